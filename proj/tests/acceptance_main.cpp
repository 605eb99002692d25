// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcard/balance.hpp"
#include "tcard/criteria.hpp"
#include "tcard/info_matrix.hpp"
#include "tcard/optimizer.hpp"
#include "tcard/report.hpp"
#include "tcard/rng.hpp"
#include "tcard/screening.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tcard;
using namespace tcard_test;
using Clock = std::chrono::steady_clock;

namespace {

std::string g_cli;
fs::path g_dir;

struct PoolEntry {
    Design design;
    Counts counts;
};

// shared random pool: 500 designs spanning p in {6..30}, k in {2..p-1}
std::vector<PoolEntry> make_pool() {
    std::vector<PoolEntry> pool;
    Rng rng(20250806);
    while (pool.size() < 500) {
        const int p = 6 + static_cast<int>(rng.below(25));
        if (p < 3) continue;
        const int k = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - 2)));
        const int n = p + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * p + 1)));
        Design d = random_tcard(n, p, k, rng.next());
        Counts c = compute_counts(d);
        pool.push_back({std::move(d), std::move(c)});
    }
    return pool;
}

const std::vector<PoolEntry>& pool() {
    static const std::vector<PoolEntry> p = make_pool();
    return p;
}

// column rank of the raw 0/1 design matrix by Gaussian elimination
int design_rank(const Design& x) {
    const auto bits = x.dense();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(x.n),
                                       std::vector<double>(static_cast<std::size_t>(x.p)));
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.p; ++j)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                bits[static_cast<std::size_t>(i) * x.p + j];
    int rank = 0;
    for (int col = 0; col < x.p && rank < x.n; ++col) {
        int piv = -1;
        double best = 1e-9;
        for (int row = rank; row < x.n; ++row) {
            if (std::abs(m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]) > best) {
                best = std::abs(m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]);
                piv = row;
            }
        }
        if (piv < 0) continue;
        std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(rank)]);
        for (int row = 0; row < x.n; ++row) {
            if (row == rank) continue;
            const double f = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] /
                             m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (int cc = col; cc < x.p; ++cc)
                m[static_cast<std::size_t>(row)][static_cast<std::size_t>(cc)] -=
                    f * m[static_cast<std::size_t>(rank)][static_cast<std::size_t>(cc)];
        }
        ++rank;
    }
    return rank;
}

bool concurrence_connected(const Counts& c) {
    std::vector<int> seen(static_cast<std::size_t>(c.p), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < c.p; ++u) {
            if (u == v || seen[static_cast<std::size_t>(u)]) continue;
            if (c.lam(v, u) > 0) {
                seen[static_cast<std::size_t>(u)] = 1;
                stack.push_back(u);
            }
        }
    }
    for (int v : seen)
        if (!v) return false;
    return true;
}

int run_cli(const std::string& args, std::string* err_path = nullptr) {
    std::string cmd = g_cli + " " + args + " >/dev/null";
    if (err_path)
        cmd += " 2>" + *err_path;
    else
        cmd += " 2>&1";
    const int status = std::system(cmd.c_str());
    return status >> 8;
}

// ---------------------------------------------------------------------------

bool criterion_1_golden(std::string& detail) {
    const auto path = (g_dir / "golden.csv").string();
    save_design_csv(example1(), path);
    const Design x = load_design_csv(path);
    const Counts c = compute_counts(x);
    if (c.r != std::vector<int>{3, 3, 3, 4, 4, 4}) {
        detail = "replication vector mismatch";
        return false;
    }
    const std::set<std::pair<int, int>> high{{0, 3}, {1, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}};
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const int want = high.count({i, j}) ? 2 : 1;
            if (c.lam(i, j) != want) {
                detail = "concurrence pattern mismatch";
                return false;
            }
        }
    const auto g = gwlp_b1_b2(c);
    if (g.b1_numerator != 6 || g.b2_numerator != 63) {  // 6/49 and 9/7 over n^2 = 49
        detail = "B1/B2 exact rationals mismatch";
        return false;
    }
    const auto cert = check_nearly_balanced(c);
    if (!cert.nb1 || !cert.nb2) {
        detail = "NB certificate false";
        return false;
    }
    const auto params = structural_params(7, 6, 3);
    if (params.f != 3 || params.s != 3 || params.kappa != 1 || params.omega != 4 ||
        !params.type1) {
        detail = "structural quadruple mismatch";
        return false;
    }
    auto deg = concurrence_excess_graph(x, params).graph.degrees();
    std::sort(deg.begin(), deg.end());
    if (deg != std::vector<int>{1, 1, 1, 3, 3, 3}) {
        detail = "excess degree sequence mismatch";
        return false;
    }
    return true;
}

bool criterion_2_cli_construct(std::string& detail) {
    const auto out = (g_dir / "c2.csv").string();
    const auto rep = (g_dir / "c2.json").string();
    const auto t0 = Clock::now();
    const int rc = run_cli("construct --n 7 --p 6 --k 3 --criterion phi-bcd --w1 1 --w2 1 "
                           "--restarts 20 --seed 1 --out " + out + " --report " + rep);
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (rc != 0) {
        detail = "construct exited " + std::to_string(rc);
        return false;
    }
    if (sec > 5.0) {
        detail = "took " + std::to_string(sec) + " s (> 5 s)";
        return false;
    }
    const json j = read_json(rep);
    if (j.at("b1_numerator") != 6 || j.at("b2_numerator") != 63) {
        detail = "CE did not reach B1 = 6/49, B2 = 9/7";
        return false;
    }
    return true;
}

bool criterion_3_ue_identity(std::string& detail) {
    for (const auto& entry : pool()) {
        const double lhs = ue_s2(entry.design);
        const double rhs = ue_s2_from_counts(entry.counts);
        if (!close(lhs, rhs, 1e-9, 1e-9)) {
            detail = "identity violated: " + std::to_string(lhs) + " vs " + std::to_string(rhs);
            return false;
        }
    }
    return true;
}

bool criterion_4_count_identities(std::string& detail) {
    Rng rng(4242);
    long long swaps_total = 0;
    for (const auto& entry : pool()) {
        const auto& c = entry.counts;
        const long long nk = static_cast<long long>(c.n) * c.k;
        long long sum_r = 0;
        for (int v : c.r) sum_r += v;
        if (sum_r != nk) {
            detail = "sum r != nk";
            return false;
        }
        long long sum_lam = 0;
        for (int i = 0; i < c.p; ++i) {
            long long row = 0;
            for (int j = 0; j < c.p; ++j) {
                if (i == j) continue;
                row += c.lam(i, j);
                if (i < j) sum_lam += c.lam(i, j);
            }
            if (row != static_cast<long long>(c.r[static_cast<std::size_t>(i)]) * (c.k - 1)) {
                detail = "per-factor concurrence identity violated";
                return false;
            }
        }
        if (sum_lam != nk * (c.k - 1) / 2) {
            detail = "sum lambda != n*C(k,2)";
            return false;
        }
        // incremental swaps against recompute (20 per design -> 10^4 total)
        Design x = entry.design;
        Counts counts = entry.counts;
        int done = 0;
        while (done < 20) {
            const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(x.n)));
            const auto& row = x.rows[static_cast<std::size_t>(t)];
            const int a = row[rng.below(static_cast<std::uint64_t>(x.k))];
            const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(x.p)));
            if (x.active(t, b)) continue;
            apply_swap(x, counts, evaluate_swap(counts, row, t, a, b));
            ++done;
            ++swaps_total;
        }
        const Counts scratch = compute_counts(x);
        if (counts.r != scratch.r || counts.lambda != scratch.lambda ||
            counts.sum_r_sq != scratch.sum_r_sq ||
            counts.sum_lambda_sq != scratch.sum_lambda_sq) {
            detail = "incremental counts diverged from recomputation";
            return false;
        }
    }
    if (swaps_total < 10000) {
        detail = "only " + std::to_string(swaps_total) + " swaps exercised";
        return false;
    }
    return true;
}

bool criterion_5_spectral(std::string& detail) {
    int checked_rank = 0;
    for (const auto& entry : pool()) {
        const auto& c = entry.counts;
        if (c.k == c.p) continue;
        const InfoMatrix info = centered_info(c);
        const auto [tr, tr2] = trace_identities(c);
        double es = 0.0, es2 = 0.0, cnorm = 0.0;
        for (double e : info.eigenvalues) {
            es += e;
            es2 += e * e;
        }
        for (double v : info.c) cnorm += v * v;
        cnorm = std::sqrt(cnorm);
        if (!close(tr, es, 1e-8, 1e-8) || !close(tr2, es2, 1e-8, 1e-8)) {
            detail = "trace identities disagree with the spectrum";
            return false;
        }
        for (int i = 0; i < info.p; ++i) {
            double row = 0.0;
            for (int j = 0; j < info.p; ++j) row += info.at(i, j);
            if (std::abs(row) > 1e-10 * cnorm) {
                detail = "C*1 exceeds 1e-10 * ||C||";
                return false;
            }
        }
        // rank condition: full-column-rank connected designs have exactly one
        // structural zero
        if (design_rank(entry.design) == entry.design.p && concurrence_connected(c)) {
            const auto pd = log_pdet(info);
            if (pd.n_below_tol != 1) {
                detail = "expected exactly one near-zero eigenvalue, got " +
                         std::to_string(pd.n_below_tol);
                return false;
            }
            ++checked_rank;
        }
    }
    if (checked_rank < 100) {
        detail = "too few full-rank designs exercised: " + std::to_string(checked_rank);
        return false;
    }
    return true;
}

bool criterion_6_bruteforce(std::string& detail) {
    const auto t0 = Clock::now();
    const Weights w{1.0, 1.0};
    int instances = 0;
    int nb2_vacuous = 0;  // instances where no design attains NB1 & NB2
    for (int p = 2; p <= 10; ++p) {
        for (int k = 1; k <= p; ++k) {
            if (binom(p, k) > 10.0) continue;
            for (int n = 1; n <= 5; ++n) {
                ++instances;
                double best_phi = std::numeric_limits<double>::infinity();
                long long best_b1 = -1;
                bool nb_exists = false;
                std::vector<Design> b1_minimizers;
                for_each_multiset_design(n, p, k, [&](const Design& d) {
                    const Counts c = compute_counts(d);
                    best_phi = std::min(best_phi, phi_bcd(c, w));
                    const auto cert = check_nearly_balanced(c);
                    nb_exists = nb_exists || (cert.nb1 && cert.nb2);
                    const auto g = gwlp_b1_b2(c);
                    if (best_b1 < 0 || g.b1_numerator < best_b1) {
                        best_b1 = g.b1_numerator;
                        b1_minimizers.clear();
                    }
                    if (g.b1_numerator == best_b1) b1_minimizers.push_back(d);
                });
                // (a) CE with R = 50 attains the global minimum
                CeConfig cfg;
                cfg.restarts = 50;
                cfg.seed = 1000 + static_cast<std::uint64_t>(instances);
                cfg.criterion.kind = CriterionSpec::Kind::PhiBCD;
                cfg.criterion.weights = w;
                const auto [xd, trace] = ce_optimize(n, p, k, cfg);
                if (!(trace.best_objective <= best_phi + 1e-12)) {
                    detail = "CE missed the global optimum at (p,k,n)=(" + std::to_string(p) +
                             "," + std::to_string(k) + "," + std::to_string(n) + ")";
                    return false;
                }
                // (b) every B1 minimizer satisfies NB1 (the even split of an
                // integer sum is always attainable, so this is unconditional)
                for (const auto& d : b1_minimizers) {
                    if (!check_nearly_balanced(d).nb1) {
                        detail = "B1 minimizer violating NB1 at (p,k,n)=(" + std::to_string(p) +
                                 "," + std::to_string(k) + "," + std::to_string(n) + ")";
                        return false;
                    }
                }
                // (c) among NB1 designs the B2 minimizers are exactly the NB2
                // designs whenever the per-factor even concurrence split is
                // attainable; where no nearly balanced design exists the split
                // is unattainable and the minimum must sit strictly above it.
                long long best_b2 = -1;
                for (const auto& d : b1_minimizers) {
                    const auto g = gwlp_b1_b2(compute_counts(d));
                    if (best_b2 < 0 || g.b2_numerator < best_b2) best_b2 = g.b2_numerator;
                }
                const auto [nb_b1_bound, nb_b2_bound] = gwlp_nb_minima(n, p, k);
                if (best_b1 != nb_b1_bound) {
                    detail = "B1 minimum differs from the even-split value at (p,k,n)=(" +
                             std::to_string(p) + "," + std::to_string(k) + "," +
                             std::to_string(n) + ")";
                    return false;
                }
                if (nb_exists) {
                    if (best_b2 != nb_b2_bound) {
                        detail = "B2 minimum misses the attainable even-split bound at "
                                 "(p,k,n)=(" + std::to_string(p) + "," + std::to_string(k) +
                                 "," + std::to_string(n) + ")";
                        return false;
                    }
                    for (const auto& d : b1_minimizers) {
                        const auto g = gwlp_b1_b2(compute_counts(d));
                        if (g.b2_numerator == best_b2 && !check_nearly_balanced(d).nb2) {
                            detail = "B2 minimizer violating NB2 at (p,k,n)=(" +
                                     std::to_string(p) + "," + std::to_string(k) + "," +
                                     std::to_string(n) + ")";
                            return false;
                        }
                    }
                } else {
                    ++nb2_vacuous;
                    if (best_b2 <= nb_b2_bound) {
                        detail = "unattainable even split reached at (p,k,n)=(" +
                                 std::to_string(p) + "," + std::to_string(k) + "," +
                                 std::to_string(n) + ")";
                        return false;
                    }
                }
            }
        }
    }
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (sec > 120.0) {
        detail = "took " + std::to_string(sec) + " s (> 2 min) over " +
                 std::to_string(instances) + " instances";
        return false;
    }
    detail = std::to_string(instances) + " instances, " + std::to_string(nb2_vacuous) +
             " with no nearly balanced design (NB2 checked as a strict lower bound there)";
    return true;
}

bool criterion_7_boundary(std::string& detail) {
    Rng rng(777);
    for (int p = 3; p <= 12; ++p) {
        const long long cap = 3LL * p * (p - 1) / 2;
        std::set<int> ns{p, p + 1, 2 * p, p * (p - 1) / 2, p * (p - 1) / 2 + 1,
                         static_cast<int>(cap)};
        for (int extra = 0; extra < 4; ++extra)
            ns.insert(p + static_cast<int>(rng.below(static_cast<std::uint64_t>(cap - p + 1))));
        for (int n : ns) {
            if (n < p || n > cap) continue;
            const auto c2 = check_nearly_balanced(construct_k2(n, p, rng.next()));
            if (!c2.nb1 || !c2.nb2) {
                detail = "k=2 construction not nearly balanced at (n,p)=(" + std::to_string(n) +
                         "," + std::to_string(p) + ")";
                return false;
            }
            const auto cp = check_nearly_balanced(construct_k_pm1(n, p));
            if (!cp.nb1 || !cp.nb2) {
                detail = "k=p-1 construction not nearly balanced at (n,p)=(" + std::to_string(n) +
                         "," + std::to_string(p) + ")";
                return false;
            }
        }
    }
    return true;
}

bool criterion_8_erdos_gallai(std::string& detail) {
    for (int m = 1; m <= 7; ++m) {
        const int pairs = m * (m - 1) / 2;
        std::vector<std::pair<int, int>> pair_list;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) pair_list.emplace_back(i, j);
        std::set<std::vector<int>> realizable;
        for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) {
            std::vector<int> deg(static_cast<std::size_t>(m), 0);
            for (int e = 0; e < pairs; ++e) {
                if (mask & (1ULL << e)) {
                    ++deg[static_cast<std::size_t>(pair_list[static_cast<std::size_t>(e)].first)];
                    ++deg[static_cast<std::size_t>(pair_list[static_cast<std::size_t>(e)].second)];
                }
            }
            std::sort(deg.begin(), deg.end(), std::greater<int>());
            realizable.insert(std::move(deg));
        }
        // every nonincreasing sequence over [0, m-1]
        std::vector<int> seq(static_cast<std::size_t>(m), 0);
        while (true) {
            if (erdos_gallai(seq) != (realizable.count(seq) > 0)) {
                detail = "mismatch on a sequence with " + std::to_string(m) + " vertices";
                return false;
            }
            int i = m - 1;
            for (; i >= 0; --i) {
                const int capd = i == 0 ? m - 1 : seq[static_cast<std::size_t>(i - 1)];
                if (seq[static_cast<std::size_t>(i)] < capd) break;
            }
            if (i < 0) break;
            ++seq[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < m; ++j) seq[static_cast<std::size_t>(j)] = 0;
        }
    }
    return true;
}

bool criterion_9_frobenius(std::string& detail) {
    for (const auto& entry : pool()) {
        const auto& c = entry.counts;
        const InfoMatrix info = centered_info(c);
        const double delta = reference_delta(c.n, c.p, c.k);
        double err = 0.0;
        for (int i = 0; i < c.p; ++i)
            for (int j = 0; j < c.p; ++j) {
                const double c0 = delta * ((i == j ? 1.0 : 0.0) - 1.0 / c.p);
                const double e = info.at(i, j) - c0;
                err += e * e;
            }
        err = std::sqrt(err);
        const auto b = frobenius_bounds(c);
        const double slack = 1e-12 * std::max(1.0, err);
        if (err > b.upper + slack) {
            detail = "upper bound violated";
            return false;
        }
        if (b.lower >= 0.0 && err < b.lower - slack) {
            detail = "nonnegative lower bound violated";
            return false;
        }
    }
    return true;
}

bool criterion_10_gap_bound(std::string& detail) {
    int applicable_cases = 0;
    for (std::size_t idx = 0; idx < pool().size(); idx += 5) {
        const auto& c = pool()[idx].counts;
        for (double alpha = 1e-2; alpha <= 1e8; alpha *= 10.0) {
            const auto g = bayes_d_gap_bound(c, alpha, 0.5);
            if (!g.applicable) continue;
            ++applicable_cases;
            if (g.g_alpha > g.bound + 1e-9 * std::max(1.0, std::abs(g.bound))) {
                detail = "gap exceeded its bound at alpha=" + std::to_string(alpha);
                return false;
            }
        }
    }
    if (applicable_cases < 100) {
        detail = "too few applicable cases: " + std::to_string(applicable_cases);
        return false;
    }
    detail = std::to_string(applicable_cases) + " applicable cases";
    return true;
}

bool criterion_11_bayesd_limits(std::string& detail) {
    struct Entry {
        double f_small = 0.0;
        double f_large = 0.0;
        double log_pdet = 0.0;
        int n_zero = 0;
        long long sum_r_sq = 0;  // orders tr C exactly
        double tr2 = 0.0;
    };
    std::vector<Entry> entries;
    for_each_multiset_design(4, 5, 2, [&](const Design& d) {
        const Counts c = compute_counts(d);
        const InfoMatrix info = centered_info(c);
        Entry e;
        e.f_small = bayes_d(info, 1e-8);
        e.f_large = bayes_d(info, 1e8);
        const auto pd = log_pdet(info);
        e.log_pdet = pd.value;
        e.n_zero = pd.n_below_tol;
        e.sum_r_sq = c.sum_r_sq;
        e.tr2 = trace_identities(c).second;
        entries.push_back(e);
    });

    // (i) small alpha: f ranking matches the (rank, pdet) lexicographic order
    for (std::size_t a = 0; a < entries.size(); ++a) {
        for (std::size_t b = a + 1; b < entries.size(); ++b) {
            const auto& ea = entries[a];
            const auto& eb = entries[b];
            int lex = 0;
            if (ea.n_zero != eb.n_zero)
                lex = ea.n_zero < eb.n_zero ? 1 : -1;  // fewer zeros ranks higher
            else if (std::abs(ea.log_pdet - eb.log_pdet) > 1e-9)
                lex = ea.log_pdet > eb.log_pdet ? 1 : -1;
            if (lex == 0) continue;
            const double df = ea.f_small - eb.f_small;
            if ((lex > 0 && df <= 0) || (lex < 0 && df >= 0)) {
                detail = "small-alpha ranking disagrees with log-pdet";
                return false;
            }
        }
    }

    // (ii) large alpha: the numerical top set maximizes tr C, and the
    // expansion ordering applies tr C^2 as the tiebreak
    long long min_sum_r_sq = entries.front().sum_r_sq;
    double max_f_large = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
        min_sum_r_sq = std::min(min_sum_r_sq, e.sum_r_sq);
        max_f_large = std::max(max_f_large, e.f_large);
    }
    for (const auto& e : entries) {
        if (e.f_large >= max_f_large - 1e-12 && e.sum_r_sq != min_sum_r_sq) {
            detail = "large-alpha top design does not maximize tr C";
            return false;
        }
    }
    // expansion comparison over all pairs at alpha = 1e8: lexicographic in
    // (tr C desc, tr C^2 asc)
    const double alpha = 1e8;
    for (std::size_t a = 0; a < entries.size(); ++a) {
        for (std::size_t b = a + 1; b < entries.size(); ++b) {
            const auto& ea = entries[a];
            const auto& eb = entries[b];
            const double tra = 8.0 - ea.sum_r_sq / 4.0;  // nk - sum r^2 / n at (n,k)=(4,2)
            const double trb = 8.0 - eb.sum_r_sq / 4.0;
            const double expa = tra / alpha - ea.tr2 / (2 * alpha * alpha);
            const double expb = trb / alpha - eb.tr2 / (2 * alpha * alpha);
            int lex = 0;
            if (ea.sum_r_sq != eb.sum_r_sq)
                lex = ea.sum_r_sq < eb.sum_r_sq ? 1 : -1;
            else if (std::abs(ea.tr2 - eb.tr2) > 1e-12)
                lex = ea.tr2 < eb.tr2 ? 1 : -1;
            if (lex == 0) continue;
            if ((lex > 0) != (expa > expb)) {
                detail = "expansion ordering disagrees with (tr C, tr C^2)";
                return false;
            }
        }
    }
    detail = std::to_string(entries.size()) + " designs enumerated";
    return true;
}

bool criterion_12_m_stage(std::string& detail) {
    // exhaustive pools at supra-threshold ratios
    for (int p = 2; p <= 6; ++p) {
        for (int k = 1; k <= p; ++k) {
            if (binom(p, k) > 10.0) continue;
            for (int n = 1; n <= 4; ++n) {
                const double threshold =
                    (p >= 2) ? 2.0 / (p - 1) * static_cast<double>((static_cast<long long>(n) * k) / p) * (k - 1)
                             : 0.0;
                const Weights w{threshold + 1.0, 1.0};
                double best = std::numeric_limits<double>::infinity();
                std::vector<Design> minimizers;
                for_each_multiset_design(n, p, k, [&](const Design& d) {
                    const double phi = phi_bcd(compute_counts(d), w);
                    if (phi < best - 1e-12) {
                        best = phi;
                        minimizers.clear();
                    }
                    if (phi <= best + 1e-12) minimizers.push_back(d);
                });
                for (const auto& d : minimizers) {
                    if (!m_stage_lockin_check(compute_counts(d))) {
                        detail = "supra-threshold global minimizer with uneven replications at "
                                 "(p,k,n)=(" + std::to_string(p) + "," + std::to_string(k) + "," +
                                 std::to_string(n) + ")";
                        return false;
                    }
                }
            }
        }
    }
    // CE outputs across 100 seeds at a mid-size instance
    const int n = 12, p = 8, k = 3;
    const double threshold = 2.0 / (p - 1) * ((static_cast<long long>(n) * k) / p) * (k - 1);
    for (int seed = 0; seed < 100; ++seed) {
        CeConfig cfg;
        cfg.restarts = 3;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.criterion.kind = CriterionSpec::Kind::PhiBCD;
        cfg.criterion.weights = {threshold * 1.25, 1.0};
        const auto [d, trace] = ce_optimize(n, p, k, cfg);
        if (!m_stage_lockin_check(compute_counts(d))) {
            detail = "CE output with uneven replications at seed " + std::to_string(seed);
            return false;
        }
    }
    return true;
}

bool criterion_13_rectangle_swaps(std::string& detail) {
    Rng rng(1313);
    std::vector<std::pair<long long, double>> moves;  // (d sum lambda^2, d tr C^2)
    int base_idx = 0;
    while (static_cast<int>(moves.size()) < 200) {
        // NB1 base design via the replication-greedy constructor
        const int p = 6 + static_cast<int>(rng.below(6));
        const int k = 2 + static_cast<int>(rng.below(3));
        const int n = p + 2 + static_cast<int>(rng.below(12));
        if (k > p) continue;
        const Design base = greedy_rep(n, p, k, rng.next());
        const Counts base_counts = compute_counts(base);
        if (!m_stage_lockin_check(base_counts)) continue;
        ++base_idx;
        for (int attempt = 0; attempt < 50 && static_cast<int>(moves.size()) < 200; ++attempt) {
            const int s = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            if (s == t) continue;
            const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            if (i == j) continue;
            if (base_counts.r[static_cast<std::size_t>(i)] !=
                base_counts.r[static_cast<std::size_t>(j)])
                continue;  // class-preserving only
            if (!base.active(s, i) || base.active(s, j) || base.active(t, i) ||
                !base.active(t, j))
                continue;
            Design x = base;
            Counts counts = base_counts;
            const auto mixed = [&](const Counts& c) {
                double acc = 0.0;
                for (int u = 0; u < c.p; ++u)
                    for (int v = u + 1; v < c.p; ++v)
                        acc += static_cast<double>(c.r[static_cast<std::size_t>(u)]) *
                               c.r[static_cast<std::size_t>(v)] / c.n * c.lam(u, v);
                return acc;
            };
            const double mixed_before = mixed(counts);
            const long long lam_before = counts.sum_lambda_sq;
            const double tr2_before = trace_identities(counts).second;
            apply_swap(x, counts, evaluate_swap(counts, x.rows[static_cast<std::size_t>(s)], s, i, j));
            apply_swap(x, counts, evaluate_swap(counts, x.rows[static_cast<std::size_t>(t)], t, j, i));
            // replication vector must be unchanged
            if (counts.r != base_counts.r) {
                detail = "rectangle swap changed the replication vector";
                return false;
            }
            const double mixed_after = mixed(counts);
            if (!close(mixed_before, mixed_after, 1e-12, 1e-12)) {
                detail = "mixed term not invariant";
                return false;
            }
            moves.emplace_back(counts.sum_lambda_sq - lam_before,
                               trace_identities(counts).second - tr2_before);
        }
        if (base_idx > 500) {
            detail = "could not generate enough class-preserving moves";
            return false;
        }
    }
    // ranking agreement across moves
    for (std::size_t a = 0; a < moves.size(); ++a) {
        for (std::size_t b = a + 1; b < moves.size(); ++b) {
            const long long dla = moves[a].first, dlb = moves[b].first;
            const double dta = moves[a].second, dtb = moves[b].second;
            if (dla == dlb) {
                if (std::abs(dta - dtb) > 1e-9) {
                    detail = "equal lambda deltas but different tr C^2 deltas";
                    return false;
                }
            } else if ((dla < dlb) != (dta < dtb)) {
                detail = "delta rankings disagree";
                return false;
            }
        }
    }
    return true;
}

bool criterion_14_screening(std::string& detail) {
    const auto t0 = Clock::now();
    CeConfig cfg;
    cfg.restarts = 20;
    cfg.seed = 14;
    cfg.criterion.kind = CriterionSpec::Kind::PhiBCD;
    const auto [design, trace] = ce_optimize(30, 20, 5, cfg);
    for (int rep = 0; rep < 50; ++rep) {
        ScreeningScenario sc;
        sc.q = 3;
        sc.nu = 1.0;
        sc.mu = 0.0;
        sc.sigma = 0.0;
        sc.seed = derive_seed(999, static_cast<std::uint64_t>(rep));
        const auto sim = simulate_response(design, sc);
        LassoConfig lc;
        lc.seed = derive_seed(sc.seed, 5);
        const auto fit = lasso_fit_pipeline(design, sim.y, lc);
        const auto m = screening_metrics(fit.selected, sim.active, fit.fitted_mean, sim.mu_true);
        if (m.f1 != 1.0) {
            detail = "replication " + std::to_string(rep) + " failed exact recovery";
            return false;
        }
    }
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (sec > 10.0) {
        detail = "took " + std::to_string(sec) + " s (> 10 s)";
        return false;
    }
    detail = "50/50 exact recoveries";
    return true;
}

bool criterion_15_scaled_cell(std::string& detail) {
    const int p = 20, n = 30, k = 5;
    double ce_b1eff = 0.0, ce_v2 = 0.0, rnd_v2 = 0.0;
    const int reps = 10;
    for (int rep = 0; rep < reps; ++rep) {
        CeConfig cfg;
        cfg.restarts = 10;
        cfg.seed = derive_seed(15, static_cast<std::uint64_t>(rep));
        cfg.criterion.kind = CriterionSpec::Kind::PhiBCD;
        const auto [ce, trace] = ce_optimize(n, p, k, cfg);
        const auto cc = compute_counts(ce);
        ce_b1eff += gwlp_b1_b2(cc).b1_eff;
        ce_v2 += v2(cc);
        const auto rd = random_tcard(n, p, k, derive_seed(16, static_cast<std::uint64_t>(rep)));
        rnd_v2 += v2(compute_counts(rd));
    }
    ce_b1eff /= reps;
    ce_v2 /= reps;
    rnd_v2 /= reps;
    std::ostringstream os;
    os << "mean B1-eff " << ce_b1eff << ", CE V2 " << ce_v2 << " vs random V2 " << rnd_v2;
    detail = os.str();
    if (!(ce_b1eff >= 0.99)) return false;
    if (!(ce_v2 < rnd_v2)) return false;
    return true;
}

bool criterion_16_tune_audit(std::string& detail) {
    const auto t0 = Clock::now();
    const auto plan_path = (g_dir / "plan.json").string();
    const auto out_path = (g_dir / "tuning.json").string();
    {
        json plan;
        plan["w1_grid"] = {0.1, 1.0, 10.0};
        plan["q_set"] = {2, 3};
        plan["scenarios"] = json::array({{{"nu", 1.0}, {"sigma", 0.5}, {"mu", 0.0}},
                                         {{"nu", 0.5}, {"sigma", 1.0}, {"mu", 1.0}}});
        plan["mc_reps"] = 20;
        plan["epsilon"] = 1e-8;
        plan["seed"] = 161;
        plan["ce"] = {{"restarts", 5}, {"max_sweeps", 200}, {"seed", 7}};
        write_json(plan, plan_path);
    }
    const int rc = run_cli("tune --n 24 --p 12 --k 3 --plan " + plan_path + " --out " + out_path);
    if (rc != 0) {
        detail = "tune exited " + std::to_string(rc);
        return false;
    }
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    if (sec > 60.0) {
        detail = "took " + std::to_string(sec) + " s (> 60 s)";
        return false;
    }
    // external recomputation of w1*(q) from the emitted raw score table
    const json rep = read_json(out_path);
    const auto grid = rep.at("w1_grid").get<std::vector<double>>();
    const auto q_set = rep.at("q_set").get<std::vector<int>>();
    const auto scores =
        rep.at("score_table").get<std::vector<std::vector<std::vector<double>>>>();
    const double eps = 1e-8;
    for (std::size_t qi = 0; qi < q_set.size(); ++qi) {
        std::vector<double> mu(grid.size(), 0.0);
        for (const auto& row : scores[qi]) {
            double mean = 0.0;
            for (double v : row) mean += v;
            mean /= static_cast<double>(grid.size());
            double var = 0.0;
            for (double v : row) var += (v - mean) * (v - mean);
            const double sd =
                std::max(std::sqrt(var / (static_cast<double>(grid.size()) - 1.0)), eps);
            for (std::size_t g = 0; g < grid.size(); ++g)
                mu[g] += (row[g] - mean) / sd / static_cast<double>(scores[qi].size());
        }
        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g) {
            if (mu[g] > mu[best] || (mu[g] == mu[best] && grid[g] < grid[best])) best = g;
        }
        const double tool_choice = rep.at("w1_star").at(std::to_string(q_set[qi])).get<double>();
        if (tool_choice != grid[best]) {
            detail = "external recomputation disagrees at q=" + std::to_string(q_set[qi]);
            return false;
        }
    }
    detail = "selection reproduced from the emitted tables";
    return true;
}

struct CriterionEntry {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc - 1; ++i)
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: tcard_acceptance --cli <path-to-tcard-binary>\n");
        return 64;
    }
    g_dir = fs::temp_directory_path() / "tcard_acceptance";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    const std::vector<CriterionEntry> criteria{
        {1, "golden instance: counts, B1/B2 rationals, NB, structural quadruple",
         criterion_1_golden},
        {2, "CLI construct reaches B1=6/49, B2=9/7 at (7,6,3) in <= 5 s",
         criterion_2_cli_construct},
        {3, "UE(s^2) definition == count identity on 500 random designs",
         criterion_3_ue_identity},
        {4, "count identities exact; 10^4 incremental swaps == recompute",
         criterion_4_count_identities},
        {5, "trace/spectral consistency and single structural zero", criterion_5_spectral},
        {6, "brute-force global optima: CE attains them; minimizers nearly balanced",
         criterion_6_bruteforce},
        {7, "boundary constructions certify nearly balanced for p in 3..12",
         criterion_7_boundary},
        {8, "degree-sequence test agrees with graph enumeration up to 7 vertices",
         criterion_8_erdos_gallai},
        {9, "Frobenius sandwich holds on 500 random designs", criterion_9_frobenius},
        {10, "gap bound dominates the realized gap whenever applicable",
         criterion_10_gap_bound},
        {11, "regularized log-det limits: pseudo-determinant and trace rankings",
         criterion_11_bayesd_limits},
        {12, "supra-threshold weights force the even replication split", criterion_12_m_stage},
        {13, "class-preserving rectangle swaps: mixed term invariant, rankings agree",
         criterion_13_rectangle_swaps},
        {14, "noiseless screening recovery 50/50 on a CE design in <= 10 s",
         criterion_14_screening},
        {15, "scaled cell: CE B1-eff >= 0.99 and V2 below random", criterion_15_scaled_cell},
        {16, "tune audit: selection reproducible from emitted tables in <= 60 s",
         criterion_16_tune_audit},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        std::string det;
        bool ok = false;
        try {
            ok = c.fn(det);
        } catch (const std::exception& ex) {
            det = std::string("exception: ") + ex.what();
        }
        const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    sec, det.empty() ? "" : " -- ", det.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    fs::remove_all(g_dir);
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
