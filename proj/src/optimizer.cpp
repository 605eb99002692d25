#include "tcard/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "tcard/rng.hpp"

namespace tcard {

std::string CriterionSpec::name() const {
    switch (kind) {
        case Kind::PhiBCD: return "phi-bcd";
        case Kind::V1: return "v1";
        case Kind::V2: return "v2";
        case Kind::UEs2: return "ue-s2";
        case Kind::MorrisMitchell: return "morris-mitchell";
        case Kind::Maximin: return "maximin";
        case Kind::Minimax: return "minimax";
    }
    return "?";
}

CriterionSpec parse_criterion(const std::string& name, const Weights& w, double mm_exponent) {
    CriterionSpec spec;
    spec.weights = w;
    spec.mm_exponent = mm_exponent;
    if (name == "phi-bcd")
        spec.kind = CriterionSpec::Kind::PhiBCD;
    else if (name == "v1")
        spec.kind = CriterionSpec::Kind::V1;
    else if (name == "v2")
        spec.kind = CriterionSpec::Kind::V2;
    else if (name == "ue-s2")
        spec.kind = CriterionSpec::Kind::UEs2;
    else if (name == "morris-mitchell")
        spec.kind = CriterionSpec::Kind::MorrisMitchell;
    else if (name == "maximin")
        spec.kind = CriterionSpec::Kind::Maximin;
    else if (name == "minimax")
        spec.kind = CriterionSpec::Kind::Minimax;
    else
        throw ValidationError("unknown criterion: " + name);
    if (spec.kind == CriterionSpec::Kind::PhiBCD) validate_weights(w);
    if (!(mm_exponent > 0.0)) throw ValidationError("Morris-Mitchell exponent must be positive");
    return spec;
}

namespace {

// Count-statistic deltas scored as (w1-ish)*d_sum_r_sq + (w2-ish)*d_sum_lambda_sq.
struct CountCoeffs {
    double cr = 0.0;
    double cl = 0.0;
};

CountCoeffs count_coeffs(const CriterionSpec& spec, int p, int k) {
    const double pairs = 0.5 * p * (p - 1);
    switch (spec.kind) {
        case CriterionSpec::Kind::PhiBCD:
            return {spec.weights.w1 / p, p >= 2 ? spec.weights.w2 / pairs : 0.0};
        case CriterionSpec::Kind::V1:
            return {1.0, 0.0};
        case CriterionSpec::Kind::V2:
            return {0.0, 1.0};
        case CriterionSpec::Kind::UEs2:
            return {4.0 * (p - 4 * k + 3), 16.0};
        default:
            throw ValidationError("not a count-based criterion");
    }
}

double count_objective(const Counts& counts, const CriterionSpec& spec) {
    switch (spec.kind) {
        case CriterionSpec::Kind::PhiBCD: return phi_bcd(counts, spec.weights);
        case CriterionSpec::Kind::V1: return v1(counts);
        case CriterionSpec::Kind::V2: return v2(counts);
        case CriterionSpec::Kind::UEs2: return ue_s2_from_counts(counts);
        default: throw ValidationError("not a count-based criterion");
    }
}

// Distance criteria are functions of the pair-overlap histogram (overlaps lie
// in 0..k, distance = 2(k - overlap)), which makes candidate scoring O(n + k).
struct OverlapState {
    int n = 0;
    int p = 0;
    int k = 0;
    std::vector<std::uint8_t> bits;  // n*p dense view
    std::vector<int> overlap;        // n*n
    std::vector<long long> hist;     // hist[o] = number of pairs with overlap o

    void init(const Design& x) {
        n = x.n;
        p = x.p;
        k = x.k;
        bits = x.dense();
        const RowGeometry geom = row_overlap_and_distances(x);
        overlap = geom.overlap;
        hist.assign(static_cast<std::size_t>(k) + 1, 0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) ++hist[static_cast<std::size_t>(geom.ov(i, j))];
    }

    // Histogram after swapping factor a out and b in on row t.
    void candidate_hist(int t, int a, int b, std::vector<long long>& out) const {
        out = hist;
        for (int s = 0; s < n; ++s) {
            if (s == t) continue;
            const int o = overlap[static_cast<std::size_t>(t) * n + s];
            const int o2 = o - bits[static_cast<std::size_t>(s) * p + a] +
                           bits[static_cast<std::size_t>(s) * p + b];
            if (o2 != o) {
                --out[static_cast<std::size_t>(o)];
                ++out[static_cast<std::size_t>(o2)];
            }
        }
    }

    void apply(int t, int a, int b) {
        for (int s = 0; s < n; ++s) {
            if (s == t) continue;
            const int o = overlap[static_cast<std::size_t>(t) * n + s];
            const int o2 = o - bits[static_cast<std::size_t>(s) * p + a] +
                           bits[static_cast<std::size_t>(s) * p + b];
            if (o2 != o) {
                --hist[static_cast<std::size_t>(o)];
                ++hist[static_cast<std::size_t>(o2)];
                overlap[static_cast<std::size_t>(t) * n + s] = o2;
                overlap[static_cast<std::size_t>(s) * n + t] = o2;
            }
        }
        bits[static_cast<std::size_t>(t) * p + a] = 0;
        bits[static_cast<std::size_t>(t) * p + b] = 1;
    }
};

// Order-faithful scalarization of the distance scores. Lexicographic ranks
// are embedded with gaps wide enough that the secondary component can never
// cross a primary step.
double hist_objective(const std::vector<long long>& hist, int n, int k,
                      const CriterionSpec& spec) {
    const double pair_count = 0.5 * n * (n - 1);
    if (spec.kind == CriterionSpec::Kind::MorrisMitchell) {
        // phi over nonzero distances is < pair_count, so duplicates dominate
        long double phi = 0.0L;
        for (int o = 0; o < k; ++o) {
            if (hist[static_cast<std::size_t>(o)] == 0) continue;
            const long double d = 2.0L * (k - o);
            phi += static_cast<long double>(hist[static_cast<std::size_t>(o)]) *
                   std::pow(d, static_cast<long double>(-spec.mm_exponent));
        }
        const double finite =
            static_cast<double>(std::pow(phi, 1.0L / static_cast<long double>(spec.mm_exponent)));
        return static_cast<double>(hist[static_cast<std::size_t>(k)]) * (pair_count + 1.0) +
               finite;
    }
    // maximin and minimax: minimize (max overlap, pairs attaining it)
    int max_ov = 0;
    for (int o = k; o >= 0; --o) {
        if (hist[static_cast<std::size_t>(o)] > 0) {
            max_ov = o;
            break;
        }
    }
    return max_ov + static_cast<double>(hist[static_cast<std::size_t>(max_ov)]) /
                        (pair_count + 1.0);
}

struct RestartResult {
    Design design{};
    double objective = 0.0;
    int sweeps = 0;
    long long accepted = 0;
};

double default_tol(const CriterionSpec& spec) { return spec.count_based() ? 0.0 : 1e-12; }

bool sweep_count_based(Design& x, Counts& counts, const CriterionSpec& spec, double tol,
                       long long* accepted, Rng* cap_rng, int candidate_cap) {
    const CountCoeffs coef = count_coeffs(spec, x.p, x.k);
    bool improved = false;
    std::vector<int> complement;
    for (int t = 0; t < x.n; ++t) {
        const Support& row = x.rows[static_cast<std::size_t>(t)];
        complement.clear();
        {
            std::size_t idx = 0;
            for (int j = 0; j < x.p; ++j) {
                if (idx < row.size() && row[idx] == j) {
                    ++idx;
                    continue;
                }
                complement.push_back(j);
            }
        }
        double best = -tol;
        int best_a = -1, best_b = -1;
        long long best_dr = 0, best_dl = 0;
        for (int a : row) {
            const long long ra = counts.r[static_cast<std::size_t>(a)];
            for (int b : complement) {
                // subsample candidates: keep each with probability cap/total
                if (candidate_cap > 0 &&
                    static_cast<int>(cap_rng->below(
                        static_cast<std::uint64_t>(x.k * (x.p - x.k)))) >= candidate_cap)
                    continue;
                const long long rb = counts.r[static_cast<std::size_t>(b)];
                const long long dr = 2 * (rb - ra + 1);
                long long dl = 0;
                for (int j : row) {
                    if (j == a) continue;
                    dl += 2 * (static_cast<long long>(counts.lam(b, j)) - counts.lam(a, j) + 1);
                }
                if (dr == 0 && dl == 0) continue;
                const double delta = coef.cr * static_cast<double>(dr) +
                                     coef.cl * static_cast<double>(dl);
                if (delta < best) {
                    best = delta;
                    best_a = a;
                    best_b = b;
                    best_dr = dr;
                    best_dl = dl;
                }
            }
        }
        if (best_a >= 0) {
            SwapDelta d;
            d.row = t;
            d.out_factor = best_a;
            d.in_factor = best_b;
            d.d_sum_r_sq = best_dr;
            d.d_sum_lambda_sq = best_dl;
            apply_swap(x, counts, d);
            improved = true;
            if (accepted) ++*accepted;
        }
    }
    return improved;
}

bool sweep_distance_based(Design& x, Counts& counts, OverlapState& state,
                          const CriterionSpec& spec, double tol, long long* accepted) {
    bool improved = false;
    std::vector<long long> cand_hist;
    for (int t = 0; t < x.n; ++t) {
        const Support row = x.rows[static_cast<std::size_t>(t)];  // copy: row mutates on apply
        const double base = hist_objective(state.hist, x.n, x.k, spec);
        double best = base - tol * std::max(1.0, std::abs(base));
        int best_a = -1, best_b = -1;
        for (int a : row) {
            for (int b = 0; b < x.p; ++b) {
                if (state.bits[static_cast<std::size_t>(t) * x.p + b]) continue;
                state.candidate_hist(t, a, b, cand_hist);
                const double obj = hist_objective(cand_hist, x.n, x.k, spec);
                if (obj < best) {
                    best = obj;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a >= 0) {
            const SwapDelta d = evaluate_swap(counts, x.rows[static_cast<std::size_t>(t)], t,
                                              best_a, best_b);
            state.apply(t, best_a, best_b);
            apply_swap(x, counts, d);
            improved = true;
            if (accepted) ++*accepted;
        }
    }
    return improved;
}

Design start_design(int n, int p, int k, std::uint64_t seed, bool random_start) {
    if (random_start || k == p) return random_tcard(n, p, k, seed);
    // greedy seed followed by a light perturbation: one random swap per row
    Design x = greedy_rep_pair(n, p, k, derive_seed(seed, 1));
    if (k < p) {
        Rng rng(derive_seed(seed, 2));
        Counts counts = compute_counts(x);
        for (int t = 0; t < n; ++t) {
            const Support& row = x.rows[static_cast<std::size_t>(t)];
            const int a = row[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)))];
            int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            while (x.active(t, b)) b = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
            apply_swap(x, counts, evaluate_swap(counts, row, t, a, b));
        }
    }
    return x;
}

RestartResult run_restart(int n, int p, int k, const CeConfig& config, int restart_index) {
    const std::uint64_t rseed = derive_seed(config.seed, static_cast<std::uint64_t>(restart_index));
    RestartResult out;
    out.design = start_design(n, p, k, rseed, config.random_start);
    Counts counts = compute_counts(out.design);
    const double tol =
        config.improvement_tol >= 0.0 ? config.improvement_tol : default_tol(config.criterion);

    OverlapState state;
    if (!config.criterion.count_based()) state.init(out.design);
    Rng cap_rng(derive_seed(rseed, 3));

    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        bool improved;
        if (config.criterion.count_based())
            improved = sweep_count_based(out.design, counts, config.criterion, tol,
                                         &out.accepted, &cap_rng, config.candidate_cap);
        else
            improved = sweep_distance_based(out.design, counts, state, config.criterion, tol,
                                            &out.accepted);
        out.sweeps = sweep + 1;
        if (!improved) break;
    }
    out.objective = criterion_objective(out.design, counts, config.criterion);
    return out;
}

}  // namespace

double criterion_objective(const Design& x, const Counts& counts, const CriterionSpec& spec) {
    if (spec.count_based()) return count_objective(counts, spec);
    OverlapState state;
    state.init(x);
    return hist_objective(state.hist, x.n, x.k, spec);
}

bool ce_sweep(Design& x, Counts& counts, const CriterionSpec& criterion, double improvement_tol) {
    const double tol = improvement_tol >= 0.0 ? improvement_tol : default_tol(criterion);
    if (criterion.count_based()) {
        Rng unused(0);
        return sweep_count_based(x, counts, criterion, tol, nullptr, &unused, 0);
    }
    OverlapState state;
    state.init(x);
    return sweep_distance_based(x, counts, state, criterion, tol, nullptr);
}

std::pair<Design, SearchTrace> ce_optimize(int n, int p, int k, const CeConfig& config) {
    if (config.restarts < 1 || config.max_sweeps < 1)
        throw ValidationError("ce_optimize: restarts and max_sweeps must be at least 1");
    if (n < 1 || p < 1 || k < 1 || k > p)
        throw ValidationError("ce_optimize: invalid (n,p,k)");

    std::vector<RestartResult> results(static_cast<std::size_t>(config.restarts));
    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (int r = 0; r < config.restarts; ++r)
            results[static_cast<std::size_t>(r)] = run_restart(n, p, k, config, r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const int r = next.fetch_add(1);
                    if (r >= config.restarts) return;
                    results[static_cast<std::size_t>(r)] = run_restart(n, p, k, config, r);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    SearchTrace trace;
    trace.restart_objectives.reserve(results.size());
    trace.restart_sweeps.reserve(results.size());
    int best = 0;
    for (int r = 0; r < config.restarts; ++r) {
        const auto& res = results[static_cast<std::size_t>(r)];
        trace.restart_objectives.push_back(res.objective);
        trace.restart_sweeps.push_back(res.sweeps);
        trace.accepted_swaps += res.accepted;
        if (res.objective < results[static_cast<std::size_t>(best)].objective) best = r;
    }
    trace.best_restart = best;
    trace.best_objective = results[static_cast<std::size_t>(best)].objective;
    return {results[static_cast<std::size_t>(best)].design, trace};
}

Design greedy_rep(int n, int p, int k, std::uint64_t seed) {
    if (n < 1 || p < 1 || k < 1 || k > p)
        throw ValidationError("greedy_rep: invalid (n,p,k)");
    Rng rng(seed);
    std::vector<int> r(static_cast<std::size_t>(p), 0);
    std::vector<int> tie(static_cast<std::size_t>(p));
    std::vector<int> order(static_cast<std::size_t>(p));
    std::vector<Support> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        std::iota(tie.begin(), tie.end(), 0);
        rng.shuffle(tie);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (r[static_cast<std::size_t>(a)] != r[static_cast<std::size_t>(b)])
                return r[static_cast<std::size_t>(a)] < r[static_cast<std::size_t>(b)];
            return tie[static_cast<std::size_t>(a)] < tie[static_cast<std::size_t>(b)];
        });
        Support s(order.begin(), order.begin() + k);
        std::sort(s.begin(), s.end());
        for (int j : s) ++r[static_cast<std::size_t>(j)];
        rows.push_back(std::move(s));
    }
    return Design{n, p, k, std::move(rows)};
}

Design greedy_rep_pair(int n, int p, int k, std::uint64_t seed) {
    if (n < 1 || p < 1 || k < 1 || k > p)
        throw ValidationError("greedy_rep_pair: invalid (n,p,k)");
    Rng rng(seed);
    std::vector<int> r(static_cast<std::size_t>(p), 0);
    std::vector<int> lambda(static_cast<std::size_t>(p) * p, 0);
    std::vector<int> tie(static_cast<std::size_t>(p));
    std::vector<Support> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        std::iota(tie.begin(), tie.end(), 0);
        rng.shuffle(tie);
        Support chosen;
        std::vector<bool> in_row(static_cast<std::size_t>(p), false);
        for (int step = 0; step < k; ++step) {
            int best = -1;
            long long best_rep = 0, best_pair = 0;
            int best_tie = 0;
            for (int j = 0; j < p; ++j) {
                if (in_row[static_cast<std::size_t>(j)]) continue;
                long long pair_load = 0;
                for (int c : chosen) pair_load += lambda[static_cast<std::size_t>(j) * p + c];
                const long long rep = r[static_cast<std::size_t>(j)];
                const int tb = tie[static_cast<std::size_t>(j)];
                if (best < 0 || rep < best_rep ||
                    (rep == best_rep && pair_load < best_pair) ||
                    (rep == best_rep && pair_load == best_pair && tb < best_tie)) {
                    best = j;
                    best_rep = rep;
                    best_pair = pair_load;
                    best_tie = tb;
                }
            }
            in_row[static_cast<std::size_t>(best)] = true;
            chosen.push_back(best);
        }
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t a = 0; a < chosen.size(); ++a) {
            ++r[static_cast<std::size_t>(chosen[a])];
            for (std::size_t b = a + 1; b < chosen.size(); ++b) {
                ++lambda[static_cast<std::size_t>(chosen[a]) * p + chosen[b]];
                ++lambda[static_cast<std::size_t>(chosen[b]) * p + chosen[a]];
            }
        }
        rows.push_back(std::move(chosen));
    }
    return Design{n, p, k, std::move(rows)};
}

bool m_stage_lockin_check(const Counts& counts) {
    const auto [lo, hi] = std::minmax_element(counts.r.begin(), counts.r.end());
    return *hi - *lo <= 1;
}

}  // namespace tcard
