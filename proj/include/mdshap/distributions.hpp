#pragma once

namespace mdshap {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

double chi2_cdf(int dof, double x);

/// Non-central chi-square CDF as a Poisson(lambda/2) mixture of central
/// chi-square CDFs with dof + 2i degrees of freedom.
double noncentral_chi2_cdf(int dof, double lambda, double x);

/// Inverse CDF of chi-square with `dof` degrees of freedom. Throws
/// InvalidLevel unless 0 < level < 1, InvalidArgument for dof < 1.
double chi2_quantile(int dof, double level);

/// Inverse CDF of the non-central chi-square; lambda == 0 reduces to
/// chi2_quantile. Throws NegativeLambda for lambda < 0.
double noncentral_chi2_quantile(int dof, double lambda, double level);

/// Outlier cutoff with its defining parameters.
struct Cutoff {
    int dof = 1;
    double level = 0.99;
    double lambda = 0.0;
    double value = 0.0;
};

Cutoff make_cutoff(int dof, double level, double lambda = 0.0);

}  // namespace mdshap
