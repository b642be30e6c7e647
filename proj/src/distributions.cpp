#include "mdshap/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdshap/error.hpp"

namespace mdshap {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw Error(ErrorCode::InvalidLevel, "level must lie in (0, 1), got " + std::to_string(level));
}

void check_dof(int dof) {
    if (dof < 1) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
}

// Series expansion, converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz), used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Central chi-square density, for Newton steps.
double chi2_pdf(double k, double x) {
    if (x <= 0.0) return 0.0;
    const double half = 0.5 * k;
    return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) - std::lgamma(half));
}

// Poisson(lambda/2) mixture of central chi-square laws with dof + 2i degrees
// of freedom, summed outward from the Poisson mode until the accumulated
// weight exceeds 1 - 1e-12. Weights, central CDFs and densities all follow
// from their values at the mode by recurrence:
//   w(i+1) = w(i) mean / (i+1),   P(a+1, y) = P(a, y) - g(a),   g(a) = y^a e^-y / Gamma(a+1),
//   f(k+2, x) = f(k, x) x / k.
struct Mixture {
    double cdf = 0.0;
    double pdf = 0.0;
};

Mixture noncentral_mixture(int dof, double lambda, double x) {
    const double mean = 0.5 * lambda;
    const double y = 0.5 * x;
    const double a0 = 0.5 * dof;
    const auto mode = static_cast<long>(std::floor(mean));
    const double m = static_cast<double>(mode);

    const double w_mode = std::exp(-mean + m * std::log(mean) - std::lgamma(m + 1.0));
    const double p_mode = regularized_gamma_p(a0 + m, y);
    const double g_mode = std::exp((a0 + m) * std::log(y) - y - std::lgamma(a0 + m + 1.0));
    const double f_mode = chi2_pdf(dof + 2.0 * m, x);

    Mixture out;
    double mass = 0.0;
    // downward state holds index `down`; upward state holds index `up`
    long down = mode;
    double w_down = w_mode, p_down = p_mode, g_down = g_mode, f_down = f_mode;
    long up = mode + 1;
    double w_up = w_mode * mean / (m + 1.0);
    double p_up = std::max(0.0, p_mode - g_mode);
    double g_up = g_mode * y / (a0 + m + 1.0);
    double f_up = f_mode * x / (dof + 2.0 * m);

    while (mass < 1.0 - 1e-12) {
        if (down >= 0 && w_down >= w_up) {
            out.cdf += w_down * p_down;
            out.pdf += w_down * f_down;
            mass += w_down;
            if (down > 0) {
                const double d = static_cast<double>(down);
                const double a = a0 + d;  // shape at `down`
                w_down *= d / mean;
                g_down *= a / y;          // g(a - 1)
                p_down += g_down;         // P(a - 1) = P(a) + g(a - 1)
                f_down *= (dof + 2.0 * d - 2.0) / x;
            }
            --down;
        } else {
            out.cdf += w_up * p_up;
            out.pdf += w_up * f_up;
            mass += w_up;
            const double u = static_cast<double>(up);
            const double a = a0 + u;
            p_up = std::max(0.0, p_up - g_up);  // P(a + 1) = P(a) - g(a)
            g_up *= y / (a + 1.0);
            f_up *= x / (dof + 2.0 * u);
            w_up *= mean / (u + 1.0);
            ++up;
        }
        if (up - down > 2L * kMaxIter) break;
    }
    out.cdf = std::clamp(out.cdf, 0.0, 1.0);
    return out;
}

template <typename Eval>
double invert(Eval eval, double level, double guess) {
    double lo = 0.0;
    double hi = std::max(guess, 1.0);
    while (eval(hi).cdf < level) {
        lo = hi;
        hi *= 2.0;
    }
    double x = std::clamp(guess, lo, hi);
    for (int iter = 0; iter < 500; ++iter) {
        const Mixture v = eval(x);
        const double f = v.cdf - level;
        if (f == 0.0) return x;
        if (f < 0.0) lo = x; else hi = x;
        double next = (v.pdf > 0.0) ? x - f / v.pdf : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-12 * std::max(1.0, x) || hi - lo < 1e-13 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma shape must be positive");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return std::min(1.0, gamma_p_series(a, x));
    return std::max(0.0, 1.0 - gamma_q_fraction(a, x));
}

double chi2_cdf(int dof, double x) {
    check_dof(dof);
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double noncentral_chi2_cdf(int dof, double lambda, double x) {
    check_dof(dof);
    if (lambda < 0.0) throw Error(ErrorCode::NegativeLambda, "non-centrality must be nonnegative");
    if (x <= 0.0) return 0.0;
    if (lambda == 0.0) return chi2_cdf(dof, x);
    return noncentral_mixture(dof, lambda, x).cdf;
}

double chi2_quantile(int dof, double level) {
    check_dof(dof);
    check_level(level);
    const double k = dof;
    const double guess = k;
    return invert([&](double x) { return Mixture{chi2_cdf(dof, x), chi2_pdf(k, x)}; }, level, guess);
}

double noncentral_chi2_quantile(int dof, double lambda, double level) {
    check_dof(dof);
    check_level(level);
    if (lambda < 0.0) throw Error(ErrorCode::NegativeLambda, "non-centrality must be nonnegative");
    if (lambda == 0.0) return chi2_quantile(dof, level);
    const double guess = dof + lambda;
    return invert([&](double x) { return x <= 0.0 ? Mixture{} : noncentral_mixture(dof, lambda, x); }, level, guess);
}

Cutoff make_cutoff(int dof, double level, double lambda) {
    return Cutoff{dof, level, lambda, noncentral_chi2_quantile(dof, lambda, level)};
}

}  // namespace mdshap
