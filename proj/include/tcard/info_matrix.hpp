#pragma once

#include <cstdint>

#include "tcard/design.hpp"
#include "tcard/linalg.hpp"

namespace tcard {

// Centered main-effects information matrix C = X^T H X with
// H = I - (1/n) 1 1^T, assembled from counts:
//   C_ii = r_i - r_i^2 / n,   C_ij = lambda_ij - r_i r_j / n.
// C 1 = 0 structurally under the constant-row-sum constraint.
struct InfoMatrix {
    int p = 0;
    SymMatrix c;                     // p*p row-major
    std::vector<double> eigenvalues;  // ascending
    double rank_tol = 1e-9;          // relative to the largest eigenvalue

    double at(int i, int j) const { return c[static_cast<std::size_t>(i) * p + j]; }
};

InfoMatrix centered_info(const Counts& counts);

// tr C = nk - (1/n) sum r_i^2 and
// tr C^2 = sum_i (r_i - r_i^2/n)^2 + 2 sum_{i<j} (lambda_ij - r_i r_j/n)^2.
std::pair<double, double> trace_identities(const Counts& counts);

// Spectral gap parameter of the balanced reference C0 = delta (I - J/p):
// delta = n k (p-k) / (p (p-1)).
double reference_delta(int n, int p, int k);

// Regularized log-determinant f_alpha = sum_i log(eig_i + alpha).
double bayes_d(const InfoMatrix& info, double alpha);

struct LogPdetResult {
    double value = 0.0;       // sum of log eig over eigenvalues above tol
    int n_below_tol = 0;      // count of near-zero eigenvalues
    bool rank_deficient = false;  // more than the single structural zero
};

// Log pseudo-determinant; flags rank deficiency when more than one eigenvalue
// falls below rank_tol * max eigenvalue.
LogPdetResult log_pdet(const InfoMatrix& info);

struct FrobeniusBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Counts-only sandwich for ||C - C0||_F:
//   sqrt(V1 + 2 V2) -/+ (1/n)(2 sqrt(p) rbar sqrt(V1) + V1).
FrobeniusBounds frobenius_bounds(const Counts& counts);

struct GapBound {
    double g_alpha = 0.0;  // f_alpha(C0) - f_alpha(C)
    double bound = 0.0;
    bool applicable = false;  // upper Frobenius bound <= rho * alpha
};

GapBound bayes_d_gap_bound(const Counts& counts, double alpha, double rho);

struct ProjectedLogdet {
    double mean = 0.0;    // over non-degenerate projections
    int n_finite = 0;
    int n_degenerate = 0;
};

// Mean log det of projected information matrices C_J over q-subsets J,
// sampled uniformly without replacement (exhaustive when C(p,q) fits in the
// budget). Degenerate projections are counted, not imputed.
ProjectedLogdet projected_logdet(const Design& x, int q, int n_subsets, std::uint64_t seed);

}  // namespace tcard
