#pragma once

#include <cstddef>

#include "mdshap/linmodel.hpp"

namespace mdshap {

/// Per-coordinate decomposition of md2(x) about a reference point.
struct ShapleyExplanation {
    Vector phi;        // contributions, sum(phi) == total
    double total = 0;  // md2 of x about `reference`
    Vector reference;  // mu, or a local reference point
};

/// Pairwise interaction indices. Off-diagonals are the pairwise Shapley
/// interaction index; diagonals are completed so that row j sums to phi_j.
struct InteractionMatrix {
    Matrix phi;
};

// Largest dimension accepted by the enumeration oracles (2^(p-1) coalitions).
inline constexpr std::size_t kMaxEnumerationDim = 20;

/// Closed form phi = (x - c) o Omega (x - c) with c = mu.
ShapleyExplanation shapley_value(const LocationScatter& model, const Vector& x);

/// Same decomposition about an arbitrary reference point c.
ShapleyExplanation shapley_value(const LocationScatter& model, const Vector& x, const Vector& reference);

InteractionMatrix interaction_matrix(const LocationScatter& model, const Vector& x);
InteractionMatrix interaction_matrix(const LocationScatter& model, const Vector& x, const Vector& reference);

/// phi_j * md / md2: the share of the squared distance carried by j, scaled to
/// the unsquared distance. Zero vector when total is zero.
Vector rescaled_contributions(const ShapleyExplanation& explanation);

// Enumeration oracles. They evaluate the coalition game v(S) = masked_md2
// directly and exist to check the closed forms; cost is exponential in p.

/// Weighted sum of marginal contributions of coordinate k over all coalitions
/// of the other coordinates.
double shapley_bruteforce(const LocationScatter& model, const Vector& x, std::size_t k);

/// Pairwise Shapley interaction index of (j, k) by enumeration.
double interaction_bruteforce(const LocationScatter& model, const Vector& x, std::size_t j, std::size_t k);

/// Third-order discrete derivative of v at T: sum over L in {j,k,l} of
/// (-1)^(3-|L|) v(T u L). Vanishes for this game.
double set_derivative3(const LocationScatter& model, const Vector& x, std::size_t j, std::size_t k,
                       std::size_t l, const IndexSet& base);

}  // namespace mdshap
