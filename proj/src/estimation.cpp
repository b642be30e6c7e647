#include "mdshap/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdshap/error.hpp"
#include "mdshap/io.hpp"

namespace mdshap {

double median(Vector values) {
    const auto n = values.size();
    if (n == 0) throw Error(ErrorCode::InsufficientRows, "median of an empty column");
    double* begin = values.data();
    double* mid = begin + n / 2;
    std::nth_element(begin, mid, begin + n);
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(begin, mid);
    return 0.5 * (lower + upper);
}

std::pair<Matrix, StandardizationPlan> robust_standardize(const Matrix& data) {
    if (data.rows() < 2) throw Error(ErrorCode::InsufficientRows, "standardization needs at least two rows");
    if (!data.allFinite()) throw Error(ErrorCode::NonFinite, "data contains NaN or Inf");
    const auto p = data.cols();
    StandardizationPlan plan{Vector(p), Vector(p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        const double center = median(data.col(j));
        const double mad = kMadConsistency * median((data.col(j).array() - center).abs().matrix());
        if (!(mad >= 1e-12))
            throw Error(ErrorCode::DegenerateColumn, "column " + std::to_string(j) + " has zero MAD");
        plan.medians(j) = center;
        plan.mads(j) = mad;
    }
    return {apply_standardization(data, plan), plan};
}

Matrix apply_standardization(const Matrix& data, const StandardizationPlan& plan) {
    if (data.cols() != plan.medians.size())
        throw Error(ErrorCode::DimensionMismatch, "standardization plan does not match column count");
    return ((data.rowwise() - plan.medians.transpose()).array().rowwise() / plan.mads.transpose().array()).matrix();
}

Matrix unstandardize(const Matrix& standardized, const StandardizationPlan& plan) {
    if (standardized.cols() != plan.medians.size())
        throw Error(ErrorCode::DimensionMismatch, "standardization plan does not match column count");
    return ((standardized.array().rowwise() * plan.mads.transpose().array()).matrix().rowwise() +
            plan.medians.transpose());
}

Vector unstandardize_row(const Vector& standardized, const StandardizationPlan& plan) {
    return standardized.cwiseProduct(plan.mads) + plan.medians;
}

Vector column_means(const Matrix& data) {
    if (data.rows() < 1) throw Error(ErrorCode::InsufficientRows, "mean of an empty matrix");
    return data.colwise().mean().transpose();
}

Matrix sample_covariance(const Matrix& data) {
    if (data.rows() <= data.cols())
        throw Error(ErrorCode::InsufficientRows, "sample covariance needs more rows (" + std::to_string(data.rows()) +
                                                     ") than columns (" + std::to_string(data.cols()) + ")");
    if (!data.allFinite()) throw Error(ErrorCode::NonFinite, "data contains NaN or Inf");
    const Matrix centered = data.rowwise() - data.colwise().mean();
    Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
    return 0.5 * (cov + cov.transpose());
}

LocationScatter load_model(const std::filesystem::path& mu_path, const std::filesystem::path& sigma_path) {
    const Matrix mu_table = read_numeric_csv(mu_path, HeaderMode::Optional).values;
    if (mu_table.cols() != 1)
        throw Error(ErrorCode::ParseError, mu_path.string() + ": expected a single column of location values");
    const Matrix sigma = read_numeric_csv(sigma_path, HeaderMode::None).values;
    Vector mu = mu_table.col(0);
    return LocationScatter::build(std::move(mu), sigma);
}

}  // namespace mdshap
