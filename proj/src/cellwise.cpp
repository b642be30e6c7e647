#include "mdshap/cellwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdshap/distributions.hpp"
#include "mdshap/error.hpp"

namespace mdshap {
namespace {

constexpr double kTieTolerance = 1e-12;

bool contains(const IndexSet& set, std::size_t j) {
    return std::find(set.begin(), set.end(), j) != set.end();
}

// Solves Omega_SS beta = (Omega a)_S for a sorted S.
Vector solve_shift(const LocationScatter& model, const Vector& omega_a, const IndexSet& s) {
    const auto k = static_cast<Eigen::Index>(s.size());
    Matrix block(k, k);
    Vector rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto ia = static_cast<Eigen::Index>(s[a]);
        rhs(a) = omega_a(ia);
        for (Eigen::Index b = 0; b < k; ++b) block(a, b) = model.omega()(ia, static_cast<Eigen::Index>(s[b]));
    }
    Eigen::LLT<Matrix> llt(block);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSubproblem, "precision submatrix is not positive definite");
    const Matrix L = llt.matrixL();
    const double max_diag = block.diagonal().maxCoeff();
    for (Eigen::Index a = 0; a < k; ++a) {
        if (!(L(a, a) * L(a, a) > kPivotTolerance * max_diag))
            throw Error(ErrorCode::SingularSubproblem, "precision submatrix is numerically singular");
    }
    return llt.solve(rhs);
}

// Indices attaining max(phi) within the tie tolerance, ascending.
IndexSet argmax_set(const Vector& phi) {
    const double top = phi.maxCoeff();
    IndexSet out;
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        if (phi(j) >= top - kTieTolerance) out.push_back(static_cast<std::size_t>(j));
    }
    return out;
}

// max over S and over its complement; an empty side is -inf.
std::pair<double, double> split_max(const Vector& phi, const std::vector<char>& in_set) {
    double in_max = -std::numeric_limits<double>::infinity();
    double out_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        if (in_set[static_cast<std::size_t>(j)]) in_max = std::max(in_max, phi(j));
        else out_max = std::max(out_max, phi(j));
    }
    return {in_max, out_max};
}

void add_flags(IndexSet& flagged, std::vector<char>& in_set, const Vector& phi) {
    for (std::size_t j : argmax_set(phi)) {
        if (!in_set[j]) {
            in_set[j] = 1;
            flagged.push_back(j);
        }
    }
}

void record(CellFlagResult& result, const DetectOptions& options, const Vector& phi, double distance,
            double cutoff) {
    if (options.record_history) result.history.push_back(Snapshot{result.shifts, phi, distance, cutoff});
}

}  // namespace

void validate(const DetectOptions& options) {
    if (!(options.delta > 0.0 && options.delta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
    if (!(options.eta >= 0.0 && options.eta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "eta must lie in [0, 1]");
    if (!(options.level > 0.0 && options.level < 1.0))
        throw Error(ErrorCode::InvalidLevel, "level must lie in (0, 1)");
}

ReplacementSolution beta_hat(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    check_observation(model, x);
    ReplacementSolution out;
    out.subset = normalize_subset(subset, model.dim());
    if (out.subset.empty()) throw Error(ErrorCode::EmptySubset, "beta_hat needs a nonempty cell set");
    const Vector omega_a = model.omega() * (x - model.mu());
    out.beta = solve_shift(model, omega_a, out.subset);
    Vector shifted = x;
    for (std::size_t a = 0; a < out.subset.size(); ++a)
        shifted(static_cast<Eigen::Index>(out.subset[a])) -= out.beta(static_cast<Eigen::Index>(a));
    out.achieved_md2 = md2(model, shifted);
    return out;
}

Vector reference_point(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    check_observation(model, x);
    const IndexSet s = normalize_subset(subset, model.dim());
    const Vector omega_a = model.omega() * (x - model.mu());
    const auto p = static_cast<Eigen::Index>(model.dim());
    Vector out(p);

    // Coordinates inside S share one solve over S itself.
    if (!s.empty()) {
        const Vector beta = solve_shift(model, omega_a, s);
        for (std::size_t a = 0; a < s.size(); ++a) {
            const auto j = static_cast<Eigen::Index>(s[a]);
            out(j) = x(j) - beta(static_cast<Eigen::Index>(a));
        }
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (contains(s, uj)) continue;
        if (s.empty()) {
            const double w = model.omega()(j, j);
            out(j) = x(j) - omega_a(j) / w;
            continue;
        }
        IndexSet extended = s;
        extended.insert(std::lower_bound(extended.begin(), extended.end(), uj), uj);
        const Vector beta = solve_shift(model, omega_a, extended);
        const auto pos = std::lower_bound(extended.begin(), extended.end(), uj) - extended.begin();
        out(j) = x(j) - beta(static_cast<Eigen::Index>(pos));
    }
    return out;
}

ShapleyExplanation explain_given_cells(const LocationScatter& model, const Vector& x, const IndexSet& subset) {
    return shapley_value(model, x, reference_point(model, x, subset));
}

CellFlagResult scd(const LocationScatter& model, const Vector& x, const DetectOptions& options) {
    validate(options);
    check_observation(model, x);
    const std::size_t p = model.dim();
    const double cutoff = chi2_quantile(static_cast<int>(p), options.level);

    CellFlagResult result;
    result.x_tilde = x;
    result.mu_tilde = model.mu();
    result.d = Vector::Zero(static_cast<Eigen::Index>(p));
    std::vector<char> in_set(p, 0);

    ShapleyExplanation current = shapley_value(model, result.x_tilde);
    record(result, options, current.phi, current.total, cutoff);

    while (current.total > cutoff) {
        if (result.shifts >= options.max_shifts) {
            result.status = DetectStatus::IterationCapExceeded;
            break;
        }
        add_flags(result.flagged, in_set, current.phi);
        const bool covers_all = result.flagged.size() == p;
        while (true) {
            const auto [in_max, out_max] = split_max(current.phi, in_set);
            if (!(in_max > out_max)) break;
            // With an empty complement the comparison above never fails.
            if (covers_all && current.total <= cutoff) break;
            if (result.shifts >= options.max_shifts) {
                result.status = DetectStatus::IterationCapExceeded;
                break;
            }
            for (std::size_t j : result.flagged) {
                const auto i = static_cast<Eigen::Index>(j);
                result.x_tilde(i) -= (result.x_tilde(i) - model.mu()(i)) * options.delta;
            }
            ++result.shifts;
            current = shapley_value(model, result.x_tilde);
            record(result, options, current.phi, current.total, cutoff);
        }
        if (result.status == DetectStatus::IterationCapExceeded) break;
    }
    result.phi_final = current;
    return result;
}

CellFlagResult moe(const LocationScatter& model, const Vector& x, const DetectOptions& options) {
    validate(options);
    check_observation(model, x);
    const std::size_t p = model.dim();
    const int dof = static_cast<int>(p);

    CellFlagResult result;
    result.x_tilde = x;
    result.d = Vector::Zero(static_cast<Eigen::Index>(p));
    std::vector<char> in_set(p, 0);

    Vector mu_tilde = reference_point(model, x, {});
    ShapleyExplanation current = shapley_value(model, result.x_tilde, mu_tilde);
    double cutoff = noncentral_chi2_quantile(dof, md2(model, mu_tilde), options.level);
    record(result, options, current.phi, current.total, cutoff);

    while (current.total > cutoff) {
        if (result.shifts >= options.max_shifts) {
            result.status = DetectStatus::IterationCapExceeded;
            break;
        }
        add_flags(result.flagged, in_set, current.phi);
        const bool covers_all = result.flagged.size() == p;
        while (true) {
            const auto [in_max, out_max] = split_max(current.phi, in_set);
            if (!(in_max > out_max)) break;
            if (covers_all && current.total <= cutoff) break;
            if (result.shifts >= options.max_shifts) {
                result.status = DetectStatus::IterationCapExceeded;
                break;
            }
            for (std::size_t j : result.flagged) {
                const auto i = static_cast<Eigen::Index>(j);
                const double step = (result.x_tilde(i) - mu_tilde(i)) * options.delta;
                result.d(i) += std::abs(step);
                result.x_tilde(i) -= step;
            }
            ++result.shifts;
            current = shapley_value(model, result.x_tilde, mu_tilde);
            record(result, options, current.phi, current.total, cutoff);
        }
        if (result.status == DetectStatus::IterationCapExceeded) break;

        // Refresh the reference point and everything measured against it.
        mu_tilde = reference_point(model, x, result.flagged);
        cutoff = noncentral_chi2_quantile(dof, md2(model, mu_tilde), options.level);
        current = shapley_value(model, result.x_tilde, mu_tilde);
        record(result, options, current.phi, current.total, cutoff);
    }

    for (Eigen::Index j = 0; j < result.d.size(); ++j) result.d(j) /= std::sqrt(model.sigma()(j, j));
    const double d_max = result.d.maxCoeff();
    result.flagged.clear();
    for (Eigen::Index j = 0; j < result.d.size(); ++j) {
        if (result.d(j) > options.eta * d_max) result.flagged.push_back(static_cast<std::size_t>(j));
    }

    result.mu_tilde = reference_point(model, x, result.flagged);
    result.phi_final = shapley_value(model, x, result.mu_tilde);
    result.x_tilde = x;
    for (std::size_t j : result.flagged) {
        const auto i = static_cast<Eigen::Index>(j);
        result.x_tilde(i) = result.mu_tilde(i);
    }
    return result;
}

}  // namespace mdshap
