#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdshap/cellwise.hpp"
#include "mdshap/error.hpp"
#include "mdshap/shapley.hpp"

namespace mdshap {

enum class Algorithm { SCD, MOE };

// Row-parallel kernels. Each has a serial twin with identical results; the
// parallel versions write into preallocated slots so output order is the
// input row order.

struct RowFailure {
    ErrorCode code;
    std::string message;
};

struct ExplainRecord {
    ShapleyExplanation explanation;
    Matrix interactions;
    std::optional<RowFailure> failure;
};

struct DetectRecord {
    CellFlagResult result;
    std::optional<RowFailure> failure;
};

std::vector<ExplainRecord> explain_rows(const LocationScatter& model, const Matrix& data, bool interactions = true);
std::vector<ExplainRecord> explain_rows_serial(const LocationScatter& model, const Matrix& data,
                                               bool interactions = true);

/// Explanations about the reference point of each row's given cell set.
std::vector<ExplainRecord> explain_rows_given_cells(const LocationScatter& model, const Matrix& data,
                                                    const std::vector<IndexSet>& cells, bool interactions = true);

std::vector<DetectRecord> detect_rows(const LocationScatter& model, const Matrix& data, Algorithm algorithm,
                                      const DetectOptions& options);
std::vector<DetectRecord> detect_rows_serial(const LocationScatter& model, const Matrix& data, Algorithm algorithm,
                                             const DetectOptions& options);

/// md2 of every row about mu; NaN for rows that fail validation.
Vector md2_rows(const LocationScatter& model, const Matrix& data);
Vector md2_rows_serial(const LocationScatter& model, const Matrix& data);

}  // namespace mdshap
