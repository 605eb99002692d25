#include "tcard/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tcard {

void validate_weights(const Weights& w) {
    if (!(w.w1 > 0.0) || !(w.w2 > 0.0))
        throw ValidationError("criterion weights must be strictly positive, got w1=" +
                              std::to_string(w.w1) + " w2=" + std::to_string(w.w2));
}

double v1(const Counts& c) {
    const long long nk = static_cast<long long>(c.n) * c.k;
    const long long num = static_cast<long long>(c.p) * c.sum_r_sq - nk * nk;
    return static_cast<double>(num) / static_cast<double>(c.p);
}

double v2(const Counts& c) {
    if (c.p < 2) return 0.0;
    const long long nkk = static_cast<long long>(c.n) * c.k * (c.k - 1);
    const long long den = 2LL * c.p * (c.p - 1);
    const long long num = den * c.sum_lambda_sq - nkk * nkk;
    return static_cast<double>(num) / static_cast<double>(den);
}

double phi_bcd(const Counts& c, const Weights& w) {
    validate_weights(w);
    const double pairs = 0.5 * c.p * (c.p - 1);
    const double v2_term = (c.p >= 2) ? (w.w2 / pairs) * v2(c) : 0.0;
    return (w.w1 / c.p) * v1(c) + v2_term;
}

double phi_bcd_delta(const Counts& c, const SwapDelta& delta, const Weights& w) {
    validate_weights(w);
    if (delta.d_sum_r_sq == 0 && delta.d_sum_lambda_sq == 0) return 0.0;
    const double pairs = 0.5 * c.p * (c.p - 1);
    double out = (w.w1 * static_cast<double>(delta.d_sum_r_sq)) / c.p;
    if (c.p >= 2) out += (w.w2 * static_cast<double>(delta.d_sum_lambda_sq)) / pairs;
    return out;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<long double>(n - k + i) / i;
    return static_cast<double>(acc);
}

GwlpReport gwlp_b1_b2(const Counts& c) {
    GwlpReport rep;
    const long long n = c.n;
    for (int j = 0; j < c.p; ++j) {
        const long long t = 2LL * c.r[static_cast<std::size_t>(j)] - n;
        rep.b1_numerator += t * t;
    }
    for (int i = 0; i < c.p; ++i) {
        for (int j = i + 1; j < c.p; ++j) {
            const long long t = 4LL * c.lam(i, j) -
                                2LL * (c.r[static_cast<std::size_t>(i)] +
                                       c.r[static_cast<std::size_t>(j)]) +
                                n;
            rep.b2_numerator += t * t;
        }
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    rep.b1 = static_cast<double>(rep.b1_numerator) / n2;
    rep.b2 = static_cast<double>(rep.b2_numerator) / n2;

    // Reference: the design containing every k-subset once. Its row count is
    // C(p,k); the efficiency ratios are invariant to replicating it.
    const double n_ref = binom(c.p, c.k);
    const double rep_ref = binom(c.p - 1, c.k - 1);           // runs containing a given factor
    const double pair_ref = (c.k >= 2) ? binom(c.p - 2, c.k - 2) : 0.0;
    const double t1 = 2.0 * rep_ref - n_ref;
    const double t2 = 4.0 * pair_ref - 4.0 * rep_ref + n_ref;
    rep.b1_ref = c.p * t1 * t1 / (n_ref * n_ref);
    rep.b2_ref = 0.5 * c.p * (c.p - 1) * t2 * t2 / (n_ref * n_ref);

    rep.b1_eff = (rep.b1_numerator == 0) ? std::numeric_limits<double>::infinity()
                                         : rep.b1_ref / rep.b1;
    rep.b2_eff = (rep.b2_numerator == 0) ? std::numeric_limits<double>::infinity()
                                         : rep.b2_ref / rep.b2;
    return rep;
}

std::pair<long long, long long> gwlp_nb_minima(int n, int p, int k) {
    const long long nk = static_cast<long long>(n) * k;
    const long long f = nk / p;
    const long long s = p - (nk - p * f);  // factors at replication f; the rest at f+1

    long long b1_num = 0;
    std::vector<long long> reps;
    reps.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) reps.push_back(j < s ? f : f + 1);
    for (long long rj : reps) b1_num += (2 * rj - n) * (2 * rj - n);

    // n^2 B2 = sum a^2 + 8 sum a*lambda + 16 sum lambda^2 with
    // a_ij = n - 2(r_i + r_j); given r, the cross term is fixed and the
    // lambda term is minimized by the per-factor even split.
    long long sum_r = 0, sum_r_sq = 0;
    for (long long rj : reps) {
        sum_r += rj;
        sum_r_sq += rj * rj;
    }
    const long long pairs = static_cast<long long>(p) * (p - 1) / 2;
    // sum_{i<j} (r_i + r_j)^2 = (p-2) sum r^2 + (sum r)^2
    const long long sum_pair_r2 = (p - 2) * sum_r_sq + sum_r * sum_r;
    const long long sum_a_sq =
        pairs * n * static_cast<long long>(n) - 4LL * n * (p - 1) * sum_r + 4 * sum_pair_r2;
    const long long sum_lambda = nk * (k - 1) / 2;
    const long long cross = 8 * (static_cast<long long>(n) * sum_lambda - 2 * (k - 1) * sum_r_sq);

    long long min_sum_lambda_sq_x2 = 0;  // 2 * min sum_{i<j} lambda^2
    if (p >= 2) {
        for (long long rj : reps) {
            const long long row_sum = rj * (k - 1);
            const long long base = row_sum / (p - 1);
            const long long extra = row_sum - base * (p - 1);
            min_sum_lambda_sq_x2 += (p - 1) * base * base + extra * (2 * base + 1);
        }
    }
    if (p < 2) return {b1_num, 0};
    const long long b2_num = sum_a_sq + cross + 8 * min_sum_lambda_sq_x2;
    return {b1_num, b2_num};
}

double ue_s2(const Design& x) {
    const auto m = x.dense();
    const int n = x.n;
    const int p = x.p;
    // intercept-factor block: S_{0,i} = sum_t z_ti with z = 2x - 1
    std::vector<long long> s0(static_cast<std::size_t>(p), 0);
    for (int i = 0; i < p; ++i) {
        long long acc = 0;
        for (int t = 0; t < n; ++t)
            acc += 2LL * m[static_cast<std::size_t>(t) * p + i] - 1;
        s0[static_cast<std::size_t>(i)] = acc;
    }
    long double sum0 = 0.0L, sum0_sq = 0.0L;
    for (long long v : s0) {
        sum0 += v;
        sum0_sq += static_cast<long double>(v) * v;
    }
    const long double block0 = sum0_sq - (sum0 * sum0) / p;

    long double sum1 = 0.0L, sum1_sq = 0.0L;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            long long acc = 0;
            for (int t = 0; t < n; ++t) {
                const int zi = 2 * m[static_cast<std::size_t>(t) * p + i] - 1;
                const int zj = 2 * m[static_cast<std::size_t>(t) * p + j] - 1;
                acc += zi * zj;
            }
            sum1 += acc;
            sum1_sq += static_cast<long double>(acc) * acc;
        }
    }
    long double block1 = 0.0L;
    if (p >= 2) {
        const long double pairs = 0.5L * p * (p - 1);
        block1 = sum1_sq - (sum1 * sum1) / pairs;
    }
    return static_cast<double>(block0 + block1);
}

double ue_s2_from_counts(const Counts& c) {
    return 4.0 * (c.p - 4 * c.k + 3) * v1(c) + 16.0 * v2(c);
}

double morris_mitchell(const RowGeometry& geom, double t) {
    if (!(t > 0.0)) throw ValidationError("Morris-Mitchell exponent must be positive");
    if (geom.n < 2) throw ValidationError("Morris-Mitchell needs at least two runs");
    long double sum = 0.0L;
    for (int i = 0; i < geom.n; ++i) {
        for (int j = i + 1; j < geom.n; ++j) {
            const int d = geom.dist(i, j);
            if (d == 0) return std::numeric_limits<double>::infinity();
            sum += std::pow(static_cast<long double>(d), static_cast<long double>(-t));
        }
    }
    return static_cast<double>(std::pow(sum, 1.0L / static_cast<long double>(t)));
}

std::pair<int, int> maximin_score(const RowGeometry& geom) {
    if (geom.n < 2) throw ValidationError("maximin needs at least two runs");
    int min_d = std::numeric_limits<int>::max();
    int count = 0;
    for (int i = 0; i < geom.n; ++i) {
        for (int j = i + 1; j < geom.n; ++j) {
            const int d = geom.dist(i, j);
            if (d < min_d) {
                min_d = d;
                count = 1;
            } else if (d == min_d) {
                ++count;
            }
        }
    }
    return {min_d, count};
}

std::pair<int, int> minimax_score(const RowGeometry& geom) {
    if (geom.n < 2) throw ValidationError("minimax needs at least two runs");
    int max_ov = -1;
    int count = 0;
    for (int i = 0; i < geom.n; ++i) {
        for (int j = i + 1; j < geom.n; ++j) {
            const int o = geom.ov(i, j);
            if (o > max_ov) {
                max_ov = o;
                count = 1;
            } else if (o == max_ov) {
                ++count;
            }
        }
    }
    return {max_ov, count};
}

std::pair<double, double> m_stage_thresholds(int n, int p, int k, const Counts& counts) {
    if (p < 2) throw ValidationError("m_stage_thresholds needs p >= 2");
    const double scale = 2.0 / (p - 1) * (k - 1);
    const double worst = scale * static_cast<double>((static_cast<long long>(n) * k) / p);
    const double fly = scale * counts.max_lambda();
    return {worst, fly};
}

}  // namespace tcard
