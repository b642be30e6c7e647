#include "mdshap/linmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdshap/error.hpp"

namespace mdshap {

LocationScatter LocationScatter::build(Vector mu, Matrix sigma) {
    const Eigen::Index p = mu.size();
    if (p < 1) throw Error(ErrorCode::DimensionMismatch, "model dimension must be at least 1");
    if (sigma.rows() != sigma.cols())
        throw Error(ErrorCode::DimensionMismatch, "sigma is not square");
    if (sigma.rows() != p)
        throw Error(ErrorCode::DimensionMismatch,
                    "mu has length " + std::to_string(p) + " but sigma is " +
                        std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()));
    if (!mu.allFinite() || !sigma.allFinite())
        throw Error(ErrorCode::NonFinite, "model contains NaN or Inf");

    const double scale = sigma.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = j + 1; k < p; ++k) {
            if (std::abs(sigma(j, k) - sigma(k, j)) > 1e-12 * scale)
                throw Error(ErrorCode::NotSymmetric,
                            "sigma(" + std::to_string(j) + "," + std::to_string(k) + ") differs from its transpose");
        }
    }
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    const double max_diag = sigma.diagonal().maxCoeff();
    if (!(max_diag > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "sigma has no positive diagonal entry");

    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    Matrix L = llt.matrixL();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(L(j, j) * L(j, j) > kPivotTolerance * max_diag))
            throw Error(ErrorCode::NotPositiveDefinite,
                        "pivot " + std::to_string(j) + " below tolerance");
    }

    LocationScatter model;
    model.omega_ = llt.solve(Matrix::Identity(p, p));
    model.omega_ = 0.5 * (model.omega_ + model.omega_.transpose()).eval();
    model.chol_ = std::move(L);
    model.mu_ = std::move(mu);
    model.sigma_ = std::move(sigma);
    return model;
}

void check_observation(const LocationScatter& model, const Vector& x) {
    if (static_cast<std::size_t>(x.size()) != model.dim())
        throw Error(ErrorCode::DimensionMismatch, "observation has length " + std::to_string(x.size()) +
                                                      ", model has dimension " + std::to_string(model.dim()));
    if (!x.allFinite()) throw Error(ErrorCode::NonFinite, "observation contains NaN or Inf");
}

double md2(const LocationScatter& model, const Vector& x) {
    return md2(model, x, model.mu());
}

double md2(const LocationScatter& model, const Vector& x, const Vector& center) {
    check_observation(model, x);
    check_observation(model, center);
    const Vector diff = x - center;
    // Triangular solve keeps the result nonnegative by construction.
    const Vector z = model.chol().triangularView<Eigen::Lower>().solve(diff);
    return z.squaredNorm();
}

IndexSet normalize_subset(const IndexSet& subset, std::size_t p) {
    IndexSet out(subset);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (!out.empty() && out.back() >= p)
        throw Error(ErrorCode::IndexOutOfRange,
                    "index " + std::to_string(out.back()) + " out of range for dimension " + std::to_string(p));
    return out;
}

Vector masked_vector(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    check_observation(model, x);
    const IndexSet s = normalize_subset(subset, model.dim());
    Vector out = model.mu();
    for (std::size_t j : s) out(static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(j));
    return out;
}

double masked_md2(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    check_observation(model, x);
    const IndexSet s = normalize_subset(subset, model.dim());
    const Matrix& omega = model.omega();
    double total = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        const auto j = static_cast<Eigen::Index>(s[a]);
        const double dj = x(j) - model.mu()(j);
        total += dj * dj * omega(j, j);
        for (std::size_t b = a + 1; b < s.size(); ++b) {
            const auto k = static_cast<Eigen::Index>(s[b]);
            total += 2.0 * dj * (x(k) - model.mu()(k)) * omega(j, k);
        }
    }
    return total;
}

LocationScatter submodel(const LocationScatter& model, const IndexSet& subset) {
    const IndexSet s = normalize_subset(subset, model.dim());
    if (s.empty()) throw Error(ErrorCode::EmptySubset, "submodel needs at least one coordinate");
    const auto k = static_cast<Eigen::Index>(s.size());
    Vector mu(k);
    Matrix sigma(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        mu(a) = model.mu()(static_cast<Eigen::Index>(s[a]));
        for (Eigen::Index b = 0; b < k; ++b)
            sigma(a, b) = model.sigma()(static_cast<Eigen::Index>(s[a]), static_cast<Eigen::Index>(s[b]));
    }
    return LocationScatter::build(std::move(mu), std::move(sigma));
}

double submodel_md2(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    check_observation(model, x);
    const IndexSet s = normalize_subset(subset, model.dim());
    if (s.empty()) return 0.0;
    const LocationScatter sub = submodel(model, s);
    Vector xs(static_cast<Eigen::Index>(s.size()));
    for (std::size_t a = 0; a < s.size(); ++a)
        xs(static_cast<Eigen::Index>(a)) = x(static_cast<Eigen::Index>(s[a]));
    return md2(sub, xs);
}

}  // namespace mdshap
