#include "tcard/info_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tcard/criteria.hpp"
#include "tcard/rng.hpp"

namespace tcard {

InfoMatrix centered_info(const Counts& counts) {
    InfoMatrix info;
    info.p = counts.p;
    const int p = counts.p;
    const double n = counts.n;
    info.c.assign(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) {
        const double ri = counts.r[static_cast<std::size_t>(i)];
        info.c[static_cast<std::size_t>(i) * p + i] = ri - ri * ri / n;
        for (int j = i + 1; j < p; ++j) {
            const double rj = counts.r[static_cast<std::size_t>(j)];
            const double v = counts.lam(i, j) - ri * rj / n;
            info.c[static_cast<std::size_t>(i) * p + j] = v;
            info.c[static_cast<std::size_t>(j) * p + i] = v;
        }
    }
    info.eigenvalues = sym_eigenvalues(info.c, p);
    return info;
}

std::pair<double, double> trace_identities(const Counts& counts) {
    const double n = counts.n;
    const double tr = static_cast<double>(counts.n) * counts.k -
                      static_cast<double>(counts.sum_r_sq) / n;
    double tr2 = 0.0;
    for (int i = 0; i < counts.p; ++i) {
        const double ri = counts.r[static_cast<std::size_t>(i)];
        const double d = ri - ri * ri / n;
        tr2 += d * d;
    }
    for (int i = 0; i < counts.p; ++i) {
        const double ri = counts.r[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < counts.p; ++j) {
            const double rj = counts.r[static_cast<std::size_t>(j)];
            const double d = counts.lam(i, j) - ri * rj / n;
            tr2 += 2.0 * d * d;
        }
    }
    return {tr, tr2};
}

double reference_delta(int n, int p, int k) {
    return static_cast<double>(n) * k * (p - k) / (static_cast<double>(p) * (p - 1));
}

double bayes_d(const InfoMatrix& info, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("bayes_d: alpha must be positive");
    double acc = 0.0;
    for (double e : info.eigenvalues) acc += std::log(std::max(e, 0.0) + alpha);
    return acc;
}

LogPdetResult log_pdet(const InfoMatrix& info) {
    LogPdetResult out;
    const double emax = info.eigenvalues.empty() ? 0.0 : info.eigenvalues.back();
    const double tol = info.rank_tol * std::max(emax, 0.0);
    for (double e : info.eigenvalues) {
        if (e > tol)
            out.value += std::log(e);
        else
            ++out.n_below_tol;
    }
    out.rank_deficient = out.n_below_tol > 1;
    return out;
}

FrobeniusBounds frobenius_bounds(const Counts& counts) {
    const double v1v = v1(counts);
    const double v2v = v2(counts);
    const double core = std::sqrt(v1v + 2.0 * v2v);
    const double correction = (2.0 * std::sqrt(static_cast<double>(counts.p)) * counts.r_bar() *
                                   std::sqrt(v1v) +
                               v1v) /
                              counts.n;
    return {core - correction, core + correction};
}

GapBound bayes_d_gap_bound(const Counts& counts, double alpha, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("gap bound: rho must be in (0,1)");
    if (!(alpha > 0.0)) throw ValidationError("gap bound: alpha must be positive");
    GapBound out;
    const int p = counts.p;
    const double delta = reference_delta(counts.n, p, counts.k);
    const double f_ref = std::log(alpha) + (p - 1) * std::log(alpha + delta);
    const InfoMatrix info = centered_info(counts);
    out.g_alpha = f_ref - bayes_d(info, alpha);
    const double u = frobenius_bounds(counts).upper;
    const double inv_norm =
        std::sqrt(1.0 / (alpha * alpha) + (p - 1) / ((alpha + delta) * (alpha + delta)));
    out.bound = inv_norm * u + u * u / (2.0 * (1.0 - rho) * alpha * alpha);
    out.applicable = u <= rho * alpha;
    return out;
}

namespace {

double binom_capped(int p, int q, double cap) {
    double acc = 1.0;
    const int kk = std::min(q, p - q);
    for (int i = 1; i <= kk; ++i) {
        acc = acc * (p - kk + i) / i;
        if (acc > cap) return cap + 1.0;
    }
    return acc;
}

}  // namespace

ProjectedLogdet projected_logdet(const Design& x, int q, int n_subsets, std::uint64_t seed) {
    if (q < 2 || q > x.p)
        throw ValidationError("projected_logdet: q must satisfy 2 <= q <= p");
    if (n_subsets < 1) throw ValidationError("projected_logdet: subset budget must be positive");
    const Counts counts = compute_counts(x);
    const int p = x.p;
    const double n = x.n;

    std::vector<std::vector<int>> subsets;
    const double total = binom_capped(p, q, 4.0 * n_subsets + 16.0);
    if (total <= static_cast<double>(n_subsets)) {
        // exhaustive lexicographic enumeration
        std::vector<int> idx(static_cast<std::size_t>(q));
        for (int i = 0; i < q; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            subsets.push_back(idx);
            int i = q - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == p - q + i) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < q; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    } else {
        Rng rng(seed);
        std::set<std::vector<int>> seen;
        while (static_cast<int>(seen.size()) < n_subsets) seen.insert(rng.k_subset(p, q));
        subsets.assign(seen.begin(), seen.end());
    }

    ProjectedLogdet out;
    double acc = 0.0;
    SymMatrix cj(static_cast<std::size_t>(q) * q);
    for (const auto& subset : subsets) {
        double max_diag = 0.0;
        for (int a = 0; a < q; ++a) {
            const int i = subset[static_cast<std::size_t>(a)];
            const double ri = counts.r[static_cast<std::size_t>(i)];
            cj[static_cast<std::size_t>(a) * q + a] = ri - ri * ri / n;
            max_diag = std::max(max_diag, cj[static_cast<std::size_t>(a) * q + a]);
            for (int b = a + 1; b < q; ++b) {
                const int j = subset[static_cast<std::size_t>(b)];
                const double rj = counts.r[static_cast<std::size_t>(j)];
                const double v = counts.lam(i, j) - ri * rj / n;
                cj[static_cast<std::size_t>(a) * q + b] = v;
                cj[static_cast<std::size_t>(b) * q + a] = v;
            }
        }
        const double tol = 1e-10 * std::max(1.0, max_diag);
        double logdet = 0.0;
        if (cholesky_logdet(cj, q, tol, logdet)) {
            acc += logdet;
            ++out.n_finite;
        } else {
            ++out.n_degenerate;
        }
    }
    out.mean = out.n_finite > 0 ? acc / out.n_finite : 0.0;
    return out;
}

}  // namespace tcard
