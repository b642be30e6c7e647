#include "mdshap/shapley.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "mdshap/error.hpp"

namespace mdshap {
namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// v(S) for a coalition encoded as a bitmask over the centered vector a.
double coalition_value(const Matrix& omega, const Vector& a, std::uint32_t mask) {
    const auto p = static_cast<Eigen::Index>(a.size());
    double total = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(mask >> j & 1u)) continue;
        total += a(j) * a(j) * omega(j, j);
        for (Eigen::Index k = j + 1; k < p; ++k) {
            if (mask >> k & 1u) total += 2.0 * a(j) * a(k) * omega(j, k);
        }
    }
    return total;
}

double binomial(std::size_t n, std::size_t k) {
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

void check_enumeration_dim(std::size_t p) {
    if (p > kMaxEnumerationDim)
        throw Error(ErrorCode::DimensionTooLarge,
                    "enumeration limited to p <= " + std::to_string(kMaxEnumerationDim) + ", got " + std::to_string(p));
}

void check_index(std::size_t j, std::size_t p) {
    if (j >= p)
        throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(j) + " out of range for dimension " + std::to_string(p));
}

}  // namespace

ShapleyExplanation shapley_value(const LocationScatter& model, const Vector& x) {
    return shapley_value(model, x, model.mu());
}

ShapleyExplanation shapley_value(const LocationScatter& model, const Vector& x, const Vector& reference) {
    check_observation(model, x);
    check_observation(model, reference);
    const Vector a = x - reference;
    ShapleyExplanation out;
    out.phi = a.cwiseProduct(model.omega() * a);
    out.total = md2(model, x, reference);
    out.reference = reference;
    return out;
}

InteractionMatrix interaction_matrix(const LocationScatter& model, const Vector& x) {
    return interaction_matrix(model, x, model.mu());
}

InteractionMatrix interaction_matrix(const LocationScatter& model, const Vector& x, const Vector& reference) {
    check_observation(model, x);
    check_observation(model, reference);
    const Vector a = x - reference;
    const Matrix& omega = model.omega();
    const auto p = a.size();
    InteractionMatrix out{Matrix::Zero(p, p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = j + 1; k < p; ++k) {
            const double v = 2.0 * a(j) * a(k) * omega(j, k);
            out.phi(j, k) = v;
            out.phi(k, j) = v;
        }
    }
    // Diagonal: a_j^2 w_jj - a_j sum_{k != j} a_k w_jk, so each row sums to phi_j.
    for (Eigen::Index j = 0; j < p; ++j) {
        double cross = 0.0;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (k != j) cross += a(k) * omega(j, k);
        }
        out.phi(j, j) = a(j) * a(j) * omega(j, j) - a(j) * cross;
    }
    return out;
}

Vector rescaled_contributions(const ShapleyExplanation& explanation) {
    if (!(explanation.total > 0.0)) return Vector::Zero(explanation.phi.size());
    return explanation.phi / std::sqrt(explanation.total);
}

double shapley_bruteforce(const LocationScatter& model, const Vector& x, std::size_t k) {
    check_observation(model, x);
    const std::size_t p = model.dim();
    check_enumeration_dim(p);
    check_index(k, p);
    const Vector a = x - model.mu();
    const std::uint32_t bit_k = 1u << k;
    const std::uint32_t full = (1u << p) - 1u;

    KahanSum acc;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
        if (mask & bit_k) continue;
        const auto s = static_cast<std::size_t>(__builtin_popcount(mask));
        // |S|! (p - |S| - 1)! / p! = 1 / (p * C(p-1, |S|))
        const double weight = 1.0 / (static_cast<double>(p) * binomial(p - 1, s));
        const double marginal = coalition_value(model.omega(), a, mask | bit_k) -
                                coalition_value(model.omega(), a, mask);
        acc.add(weight * marginal);
    }
    return acc.sum;
}

double interaction_bruteforce(const LocationScatter& model, const Vector& x, std::size_t j, std::size_t k) {
    check_observation(model, x);
    const std::size_t p = model.dim();
    check_enumeration_dim(p);
    check_index(j, p);
    check_index(k, p);
    if (j == k) throw Error(ErrorCode::IndexOverlap, "interaction index needs j != k");
    const Vector a = x - model.mu();
    const std::uint32_t bj = 1u << j;
    const std::uint32_t bk = 1u << k;
    const std::uint32_t full = (1u << p) - 1u;

    KahanSum acc;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
        if (mask & (bj | bk)) continue;
        const auto t = static_cast<std::size_t>(__builtin_popcount(mask));
        // t! (p - t - 2)! / (p - 1)! = 1 / ((p - 1) * C(p-2, t))
        const double weight = 1.0 / (static_cast<double>(p - 1) * binomial(p - 2, t));
        const double delta = coalition_value(model.omega(), a, mask | bj | bk) -
                             coalition_value(model.omega(), a, mask | bj) -
                             coalition_value(model.omega(), a, mask | bk) +
                             coalition_value(model.omega(), a, mask);
        acc.add(weight * delta);
    }
    return acc.sum;
}

double set_derivative3(const LocationScatter& model, const Vector& x, std::size_t j, std::size_t k,
                       std::size_t l, const IndexSet& base) {
    check_observation(model, x);
    const std::size_t p = model.dim();
    check_index(j, p);
    check_index(k, p);
    check_index(l, p);
    if (j == k || j == l || k == l) throw Error(ErrorCode::IndexOverlap, "triple indices must be distinct");
    const IndexSet t = normalize_subset(base, p);
    for (std::size_t i : t) {
        if (i == j || i == k || i == l) throw Error(ErrorCode::IndexOverlap, "base set overlaps the triple");
    }

    const std::size_t triple[3] = {j, k, l};
    KahanSum acc;
    for (unsigned pick = 0; pick < 8; ++pick) {
        IndexSet coalition = t;
        int size = 0;
        for (int b = 0; b < 3; ++b) {
            if (pick >> b & 1u) {
                coalition.push_back(triple[b]);
                ++size;
            }
        }
        const double sign = ((3 - size) % 2 == 0) ? 1.0 : -1.0;
        acc.add(sign * masked_md2(model, x, coalition));
    }
    return acc.sum;
}

}  // namespace mdshap
