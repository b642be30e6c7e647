#include "mdshap/batch.hpp"

#include <cstddef>
#include <limits>

namespace mdshap {
namespace {

template <typename Fn>
auto capture(Fn&& fn) -> std::optional<RowFailure> {
    try {
        fn();
    } catch (const Error& e) {
        return RowFailure{e.code(), e.what()};
    }
    return std::nullopt;
}

ExplainRecord explain_one(const LocationScatter& model, const Vector& x, const Vector* reference, bool interactions) {
    ExplainRecord rec;
    rec.failure = capture([&] {
        rec.explanation = reference ? shapley_value(model, x, *reference) : shapley_value(model, x);
        if (interactions) rec.interactions = interaction_matrix(model, x, rec.explanation.reference).phi;
    });
    return rec;
}

DetectRecord detect_one(const LocationScatter& model, const Vector& x, Algorithm algorithm,
                        const DetectOptions& options) {
    DetectRecord rec;
    rec.failure = capture([&] { rec.result = algorithm == Algorithm::SCD ? scd(model, x, options) : moe(model, x, options); });
    return rec;
}

}  // namespace

std::vector<ExplainRecord> explain_rows(const LocationScatter& model, const Matrix& data, bool interactions) {
    const auto n = static_cast<std::ptrdiff_t>(data.rows());
    std::vector<ExplainRecord> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Vector x = data.row(i).transpose();
        out[static_cast<std::size_t>(i)] = explain_one(model, x, nullptr, interactions);
    }
    return out;
}

std::vector<ExplainRecord> explain_rows_serial(const LocationScatter& model, const Matrix& data, bool interactions) {
    std::vector<ExplainRecord> out;
    out.reserve(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i) out.push_back(explain_one(model, data.row(i).transpose(), nullptr, interactions));
    return out;
}

std::vector<ExplainRecord> explain_rows_given_cells(const LocationScatter& model, const Matrix& data,
                                                    const std::vector<IndexSet>& cells, bool interactions) {
    if (cells.size() != static_cast<std::size_t>(data.rows()))
        throw Error(ErrorCode::ShapeMismatch, "cell sets do not match the number of rows");
    const auto n = static_cast<std::ptrdiff_t>(data.rows());
    std::vector<ExplainRecord> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto slot = static_cast<std::size_t>(i);
        const Vector x = data.row(i).transpose();
        Vector reference;
        auto failure = capture([&] { reference = reference_point(model, x, cells[slot]); });
        if (failure) {
            out[slot].failure = std::move(failure);
            continue;
        }
        out[slot] = explain_one(model, x, &reference, interactions);
    }
    return out;
}

std::vector<DetectRecord> detect_rows(const LocationScatter& model, const Matrix& data, Algorithm algorithm,
                                      const DetectOptions& options) {
    validate(options);
    const auto n = static_cast<std::ptrdiff_t>(data.rows());
    std::vector<DetectRecord> out(static_cast<std::size_t>(n));
    // Iteration counts vary a lot between clean and contaminated rows.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = detect_one(model, data.row(i).transpose(), algorithm, options);
    }
    return out;
}

std::vector<DetectRecord> detect_rows_serial(const LocationScatter& model, const Matrix& data, Algorithm algorithm,
                                             const DetectOptions& options) {
    validate(options);
    std::vector<DetectRecord> out;
    out.reserve(static_cast<std::size_t>(data.rows()));
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        out.push_back(detect_one(model, data.row(i).transpose(), algorithm, options));
    return out;
}

Vector md2_rows(const LocationScatter& model, const Matrix& data) {
    const auto n = static_cast<std::ptrdiff_t>(data.rows());
    Vector out(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double value = std::numeric_limits<double>::quiet_NaN();
        capture([&] { value = md2(model, data.row(i).transpose()); });
        out(i) = value;
    }
    return out;
}

Vector md2_rows_serial(const LocationScatter& model, const Matrix& data) {
    Vector out(data.rows());
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double value = std::numeric_limits<double>::quiet_NaN();
        capture([&] { value = md2(model, data.row(i).transpose()); });
        out(i) = value;
    }
    return out;
}

}  // namespace mdshap
