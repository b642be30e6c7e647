#pragma once

#include <filesystem>
#include <utility>

#include "mdshap/linmodel.hpp"

namespace mdshap {

// Normal-consistency factor for the median absolute deviation.
inline constexpr double kMadConsistency = 1.4826;

struct StandardizationPlan {
    Vector medians;
    Vector mads;  // already multiplied by kMadConsistency
};

/// Column-wise (x - median) / MAD. Throws DegenerateColumn when a MAD is below
/// 1e-12, NonFinite on NaN/Inf, InsufficientRows for n < 2.
std::pair<Matrix, StandardizationPlan> robust_standardize(const Matrix& data);

Matrix apply_standardization(const Matrix& data, const StandardizationPlan& plan);
Matrix unstandardize(const Matrix& standardized, const StandardizationPlan& plan);
Vector unstandardize_row(const Vector& standardized, const StandardizationPlan& plan);

double median(Vector values);

Vector column_means(const Matrix& data);

/// Unbiased sample covariance (divisor n - 1). Requires n > p. The result may
/// be singular; build a LocationScatter from it to test definiteness.
Matrix sample_covariance(const Matrix& data);

/// mu from a single-column CSV (optional header line), sigma from a headerless
/// square CSV.
LocationScatter load_model(const std::filesystem::path& mu_path, const std::filesystem::path& sigma_path);

}  // namespace mdshap
