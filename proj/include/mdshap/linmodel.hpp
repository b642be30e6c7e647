#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace mdshap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Coordinate indices, 0-based. Functions taking an IndexSet accept any order
// and ignore duplicates unless stated otherwise.
using IndexSet = std::vector<std::size_t>;

// Relative pivot tolerance for the positive-definiteness test: every squared
// Cholesky pivot must exceed this times the largest diagonal entry of sigma.
inline constexpr double kPivotTolerance = 1e-10;

/// Location/scatter model (mu, Sigma) with its Cholesky factor and precision
/// matrix Omega = Sigma^-1. Immutable once built; safe to share across threads.
class LocationScatter {
public:
    /// Validates and factorizes. Throws Error with DimensionMismatch,
    /// NonFinite, NotSymmetric or NotPositiveDefinite.
    static LocationScatter build(Vector mu, Matrix sigma);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(mu_.size()); }
    const Vector& mu() const noexcept { return mu_; }
    const Matrix& sigma() const noexcept { return sigma_; }
    const Matrix& omega() const noexcept { return omega_; }
    /// Lower-triangular L with Sigma = L L'.
    const Matrix& chol() const noexcept { return chol_; }

private:
    LocationScatter() = default;

    Vector mu_;
    Matrix sigma_;
    Matrix omega_;
    Matrix chol_;
};

/// Throws DimensionMismatch / NonFinite unless x is a finite vector of length p.
void check_observation(const LocationScatter& model, const Vector& x);

/// Squared Mahalanobis distance (x - mu)' Omega (x - mu).
double md2(const LocationScatter& model, const Vector& x);

/// Squared Mahalanobis distance about an arbitrary center: (x - c)' Omega (x - c).
double md2(const LocationScatter& model, const Vector& x, const Vector& center);

/// Resolved masked vector: x_j for j in S, mu_j otherwise.
Vector masked_vector(const LocationScatter& model, const Vector& x, const IndexSet& subset);

/// md2 of the masked vector. Only the coordinates in S enter, through the
/// Omega_SS block: (x_S - mu_S)' Omega_SS (x_S - mu_S).
double masked_md2(const LocationScatter& model, const Vector& x, const IndexSet& subset);

/// md2 of the subvector x_S under the marginal model (mu_S, Sigma_SS). This is
/// not the same as masked_md2 unless S and its complement are uncorrelated.
double submodel_md2(const LocationScatter& model, const Vector& x, const IndexSet& subset);

/// Sorted, de-duplicated copy; throws IndexOutOfRange for indices >= p.
IndexSet normalize_subset(const IndexSet& subset, std::size_t p);

/// Extracts the (mu_S, Sigma_SS) marginal model.
LocationScatter submodel(const LocationScatter& model, const IndexSet& subset);

}  // namespace mdshap
