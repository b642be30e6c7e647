#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mdshap/cellwise.hpp"
#include "mdshap/linmodel.hpp"

namespace mdshap {

enum class CovKind { Mod, Mix, Low };
enum class Scenario { Shift, Structured };
enum class Detector { SCD, MOE };

std::string_view to_string(CovKind kind) noexcept;
std::string_view to_string(Scenario scenario) noexcept;
std::string_view to_string(Detector detector) noexcept;
CovKind parse_cov_kind(std::string_view text);
Scenario parse_scenario(std::string_view text);
Detector parse_detector(std::string_view text);

using Rng = std::mt19937_64;

/// splitmix64 finalizer chained over the inputs; used to derive independent
/// sub-seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// ceil(n * fraction), robust to representation error in the product.
std::size_t ceil_count(std::size_t n, double fraction);

/// Boolean n x p cell mask.
class CellMask {
public:
    CellMask() = default;
    CellMask(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value = true) { cells_[i * cols_ + j] = value ? 1 : 0; }
    std::size_t count() const;
    std::size_t count_row(std::size_t i) const;
    std::size_t count_col(std::size_t j) const;
    bool operator==(const CellMask&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<char> cells_;
};

struct SimulationCase {
    std::size_t p = 10;
    std::size_t n = 200;  // 20 p
    CovKind cov_kind = CovKind::Mix;
    Scenario scenario = Scenario::Structured;
    double eps1 = 0.1;  // shift: fraction of cells per contaminated row
    double eps2 = 0.1;  // shift: fraction of contaminated rows
    double eps3 = 0.1;  // structured: fraction of cells per column
    double gamma = 1.0;
    std::uint64_t seed = 0;  // derived case seed
    std::size_t case_index = 0;
    std::size_t replication = 0;
};

struct Metrics {
    double precision = 1.0;
    double recall = 1.0;
    double fscore = 1.0;
};

struct MetricRow {
    SimulationCase sim_case;
    Detector detector = Detector::SCD;
    Metrics metrics;
    std::size_t true_cells = 0;
    std::size_t flagged_cells = 0;
    std::string error;  // nonempty when the case failed; metrics are then NaN
};

struct Contaminated {
    Matrix data;
    CellMask truth;
};

/// Unit-diagonal correlation matrix of the requested family.
Matrix make_covariance(CovKind kind, std::size_t p, std::uint64_t seed);

/// n x p draws from N(0, sigma) through the Cholesky factor.
Matrix generate_clean(std::size_t n, const Matrix& sigma, std::uint64_t seed);
Matrix generate_clean(const SimulationCase& sim_case, const Matrix& sigma);

/// ceil(n eps2) random rows each get ceil(p eps1) random cells replaced by a
/// draw from N(gamma 1, S) with S having unit diagonal and 0.7 off-diagonal.
Contaminated inject_shift(const Matrix& data, double eps1, double eps2, double gamma, std::uint64_t seed);

/// ceil(n eps3) random cells per column. In each row, the selected set K is
/// replaced by gamma sqrt(k) u / md(u) along the smallest-eigenvalue
/// eigenvector u of Sigma_K.
Contaminated inject_structured(const Matrix& data, const LocationScatter& model, double eps3, double gamma,
                               std::uint64_t seed);

/// Precision is 1 with no flags, recall is 1 with no true cells.
Metrics evaluate(const CellMask& flagged, const CellMask& truth);

struct GridConfig {
    Scenario scenario = Scenario::Structured;
    std::vector<CovKind> cov_kinds{CovKind::Mix};
    std::vector<std::size_t> dims{10};
    std::vector<double> eps1{0.1};
    std::vector<double> eps2{0.1};
    std::vector<double> eps3{0.1};
    std::vector<double> gammas{2.0};
    std::size_t replications = 1;
    std::uint64_t master_seed = 1;
    std::vector<Detector> detectors{Detector::SCD, Detector::MOE};
    DetectOptions detect;
    // Drop gamma = 2 for the moderate and mixed correlation families.
    bool skip_low_gamma_correlated = false;
};

void validate(const GridConfig& config);

/// Every case x replication, in a fixed order with sub-seeds already derived.
std::vector<SimulationCase> expand_cases(const GridConfig& config);

/// Generate, contaminate, detect and score one case; one row per detector.
std::vector<MetricRow> run_case(const SimulationCase& sim_case, const GridConfig& config);

/// OpenMP over cases. Output order and values equal run_grid_serial.
std::vector<MetricRow> run_grid(const GridConfig& config);
std::vector<MetricRow> run_grid_serial(const GridConfig& config);

struct AggregateRow {
    CovKind cov_kind = CovKind::Mix;
    Detector detector = Detector::SCD;
    std::size_t count = 0;
    Metrics mean;
};

/// Means grouped by (cov_kind, detector), skipping failed rows.
std::vector<AggregateRow> aggregate(const std::vector<MetricRow>& rows);

}  // namespace mdshap
