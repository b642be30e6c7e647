#pragma once

#include <cstddef>
#include <vector>

#include "mdshap/linmodel.hpp"
#include "mdshap/shapley.hpp"

namespace mdshap {

/// Least-squares cell shift for a fixed cell set S: beta minimizes
/// md2(x - E_S beta), so x_S - beta are the imputed cells.
struct ReplacementSolution {
    IndexSet subset;  // sorted
    Vector beta;      // aligned with `subset`
    double achieved_md2 = 0;
};

ReplacementSolution beta_hat(const LocationScatter& model, const Vector& x, const IndexSet& subset);

/// Reference point: coordinate j is x_j - beta_j(S u {j}). For an empty S
/// this is x_j - (Omega (x - mu))_j / omega_jj.
Vector reference_point(const LocationScatter& model, const Vector& x, const IndexSet& subset);

/// phi(x) about the reference point for an externally supplied cell set.
ShapleyExplanation explain_given_cells(const LocationScatter& model, const Vector& x, const IndexSet& subset);

struct DetectOptions {
    double delta = 0.1;            // step size in (0, 1]
    double eta = 0.2;              // MOE flag threshold in [0, 1]
    double level = 0.99;           // cutoff quantile
    std::size_t max_shifts = 10000;
    bool record_history = true;
};

enum class DetectStatus { Converged, IterationCapExceeded };

struct Snapshot {
    std::size_t iteration = 0;  // number of inner shifts applied so far
    Vector phi;
    double md2 = 0;
    double cutoff = 0;
};

struct CellFlagResult {
    Vector x_tilde;
    IndexSet flagged;  // SCD: flag order; MOE: ascending
    Vector mu_tilde;   // mu for SCD
    Vector d;          // scaled shift distances; zero for SCD
    ShapleyExplanation phi_final;
    std::vector<Snapshot> history;
    DetectStatus status = DetectStatus::Converged;
    std::size_t shifts = 0;
};

/// Shapley Cell Detector: shifts the highest-contribution cells toward mu.
CellFlagResult scd(const LocationScatter& model, const Vector& x, const DetectOptions& options = {});

/// Multivariate Outlier Explainer: shifts cells toward a local reference point,
/// with a non-central chi-square cutoff, then re-derives the cell set from the
/// accumulated shift distances.
CellFlagResult moe(const LocationScatter& model, const Vector& x, const DetectOptions& options = {});

void validate(const DetectOptions& options);

}  // namespace mdshap
