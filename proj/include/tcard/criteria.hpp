#pragma once

#include <utility>

#include "tcard/design.hpp"

namespace tcard {

struct Weights {
    double w1 = 1.0;
    double w2 = 1.0;
};

void validate_weights(const Weights& w);  // both strictly positive

// Replication imbalance sum_j (r_j - rbar)^2, evaluated from the exact
// integer statistic: (p*sum_r_sq - (n k)^2) / p.
double v1(const Counts& counts);

// Concurrence dispersion sum_{i<j} (lambda_ij - lbar)^2
//   = (2 p (p-1) sum_lambda_sq - (n k (k-1))^2) / (2 p (p-1)).
double v2(const Counts& counts);

// Balanced concurrence deviation: (w1/p) V1 + (w2/C(p,2)) V2.
double phi_bcd(const Counts& counts, const Weights& w);

// Exact criterion change of a within-row swap. The targets cancel because
// sum r and sum lambda are swap-invariant, so this is
// (w1/p) d_sum_r_sq + (w2/C(p,2)) d_sum_lambda_sq.
double phi_bcd_delta(const Counts& counts, const SwapDelta& delta, const Weights& w);

struct GwlpReport {
    double b1 = 0.0;
    double b2 = 0.0;
    long long b1_numerator = 0;  // b1 = b1_numerator / n^2, exact
    long long b2_numerator = 0;  // b2 = b2_numerator / n^2, exact
    double b1_ref = 0.0;         // full k-combination design reference
    double b2_ref = 0.0;
    double b1_eff = 0.0;  // b1_ref / b1; +inf when b1 == 0
    double b2_eff = 0.0;
    long long tilde_lambda = 1;  // reference multiplicity (ratios do not depend on it)
};

// B1 = (1/n^2) sum_j (2 r_j - n)^2,
// B2 = (1/n^2) sum_{i<j} (4 lambda_ij - 2(r_i + r_j) + n)^2,
// with the full-design reference values and efficiency ratios.
GwlpReport gwlp_b1_b2(const Counts& counts);

// Discrete minima of B1 / B2 attainable under near balance at these (n,p,k):
// the even replication split for B1 and, conditional on it, the per-factor
// even concurrence split for B2. Returned as exact numerators over n^2.
std::pair<long long, long long> gwlp_nb_minima(int n, int p, int k);

// Centered UE(s^2) computed from its definition: recode to ±1, augment with
// the intercept column, and sum the squared deviations of the two off-diagonal
// blocks of the Gram matrix from their blockwise means. O(n p^2).
double ue_s2(const Design& x);

// The same quantity from counts: 4 (p - 4k + 3) V1 + 16 V2. Used as the fast
// path and as the cross-check against the definition.
double ue_s2_from_counts(const Counts& counts);

// (sum_{i<j} d_ij^{-t})^{1/t}; any zero distance yields +infinity.
double morris_mitchell(const RowGeometry& geom, double t);

// Lexicographic scores. maximin prefers a larger minimum distance, then fewer
// pairs attaining it; minimax prefers a smaller maximum overlap, then fewer
// pairs attaining it. Under d = 2(k - overlap) the two orders coincide; both
// are reported.
std::pair<int, int> maximin_score(const RowGeometry& geom);
std::pair<int, int> minimax_score(const RowGeometry& geom);

// Weight-ratio thresholds above which any global phi_bcd minimizer has an
// even replication split: the worst-case bound (2/(p-1)) floor(nk/p) (k-1)
// and the on-the-fly variant using the current max concurrence.
std::pair<double, double> m_stage_thresholds(int n, int p, int k, const Counts& counts);

// Binomial coefficient as long double (exact up to ~2^64).
double binom(int n, int k);

}  // namespace tcard
