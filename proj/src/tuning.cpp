#include "tcard/tuning.hpp"

#include <cmath>

#include "tcard/rng.hpp"

namespace tcard {

std::vector<double> zscore_standardize(const std::vector<double>& scores, double epsilon) {
    if (scores.size() < 2)
        throw ValidationError("zscore_standardize: needs at least two grid values");
    if (!(epsilon > 0.0)) throw ValidationError("zscore_standardize: epsilon must be positive");
    const int g = static_cast<int>(scores.size());
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= g;
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    const double sd = std::sqrt(var / (g - 1));
    const double denom = std::max(sd, epsilon);
    std::vector<double> z;
    z.reserve(scores.size());
    for (double s : scores) z.push_back((s - mean) / denom);
    return z;
}

TuningResult tune_w1(int n, int p, int k, const TuningPlan& plan) {
    if (plan.w1_grid.size() < 2)
        throw ValidationError("tune_w1: the w1 grid needs at least two points");
    for (double w : plan.w1_grid)
        if (!(w > 0.0)) throw ValidationError("tune_w1: grid values must be positive");
    if (plan.q_set.empty()) throw ValidationError("tune_w1: empty q set");
    if (plan.scenarios.empty()) throw ValidationError("tune_w1: empty scenario set");
    if (plan.mc_reps < 1) throw ValidationError("tune_w1: mc_reps must be at least 1");
    if (!(plan.epsilon > 0.0)) throw ValidationError("tune_w1: epsilon must be positive");
    double weight_total = 0.0;
    for (const auto& h : plan.scenarios) {
        if (!(h.weight > 0.0)) throw ValidationError("tune_w1: scenario weights must be positive");
        weight_total += h.weight;
    }

    const int g_count = static_cast<int>(plan.w1_grid.size());
    const int q_count = static_cast<int>(plan.q_set.size());
    const int h_count = static_cast<int>(plan.scenarios.size());

    TuningResult res;
    res.w1_grid = plan.w1_grid;
    res.q_set = plan.q_set;
    res.n_scenarios = h_count;

    // Stage 1: commit one design per grid point. The CE budget and restart
    // seeds are identical across the grid so only the criterion varies.
    res.grid_designs.reserve(static_cast<std::size_t>(g_count));
    for (int g = 0; g < g_count; ++g) {
        CeConfig cfg = plan.ce;
        cfg.criterion.kind = CriterionSpec::Kind::PhiBCD;
        cfg.criterion.weights = Weights{plan.w1_grid[static_cast<std::size_t>(g)], 1.0};
        res.grid_designs.push_back(ce_optimize(n, p, k, cfg).first);
    }

    // Stage 2: pure simulation scoring. Replication seeds depend on (q,h,b)
    // only, so grid points are compared on identical datasets.
    res.score_table.assign(static_cast<std::size_t>(q_count),
                           std::vector<std::vector<double>>(
                               static_cast<std::size_t>(h_count),
                               std::vector<double>(static_cast<std::size_t>(g_count), 0.0)));
    for (int qi = 0; qi < q_count; ++qi) {
        for (int hi = 0; hi < h_count; ++hi) {
            const TuningScenario& h = plan.scenarios[static_cast<std::size_t>(hi)];
            for (int g = 0; g < g_count; ++g) {
                double f1_acc = 0.0;
                for (int b = 0; b < plan.mc_reps; ++b) {
                    ScreeningScenario sc;
                    sc.q = plan.q_set[static_cast<std::size_t>(qi)];
                    sc.nu = h.nu;
                    sc.sigma = h.sigma;
                    sc.mu = h.mu;
                    sc.seed = derive_seed(plan.seed, static_cast<std::uint64_t>(qi),
                                          static_cast<std::uint64_t>(hi),
                                          static_cast<std::uint64_t>(b));
                    const auto sim =
                        simulate_response(res.grid_designs[static_cast<std::size_t>(g)], sc);
                    LassoConfig lc;
                    lc.seed = derive_seed(sc.seed, 0x77);
                    const auto fit = lasso_fit_pipeline(
                        res.grid_designs[static_cast<std::size_t>(g)], sim.y, lc);
                    f1_acc += screening_metrics(fit.selected, sim.active, fit.fitted_mean,
                                                sim.mu_true)
                                  .f1;
                }
                res.score_table[static_cast<std::size_t>(qi)][static_cast<std::size_t>(hi)]
                               [static_cast<std::size_t>(g)] = f1_acc / plan.mc_reps;
            }
        }
    }

    // Stage 3: standardize, aggregate over h, select.
    res.z_table = res.score_table;
    res.mu_q.assign(static_cast<std::size_t>(q_count),
                    std::vector<double>(static_cast<std::size_t>(g_count), 0.0));
    for (int qi = 0; qi < q_count; ++qi) {
        for (int hi = 0; hi < h_count; ++hi) {
            res.z_table[static_cast<std::size_t>(qi)][static_cast<std::size_t>(hi)] =
                zscore_standardize(
                    res.score_table[static_cast<std::size_t>(qi)][static_cast<std::size_t>(hi)],
                    plan.epsilon);
            const double wh = plan.scenarios[static_cast<std::size_t>(hi)].weight / weight_total;
            for (int g = 0; g < g_count; ++g)
                res.mu_q[static_cast<std::size_t>(qi)][static_cast<std::size_t>(g)] +=
                    wh * res.z_table[static_cast<std::size_t>(qi)][static_cast<std::size_t>(hi)]
                                    [static_cast<std::size_t>(g)];
        }
        int best = 0;
        for (int g = 1; g < g_count; ++g) {
            const double mu = res.mu_q[static_cast<std::size_t>(qi)][static_cast<std::size_t>(g)];
            const double mu_best =
                res.mu_q[static_cast<std::size_t>(qi)][static_cast<std::size_t>(best)];
            // ties resolve to the smallest w1
            if (mu > mu_best || (mu == mu_best && plan.w1_grid[static_cast<std::size_t>(g)] <
                                                      plan.w1_grid[static_cast<std::size_t>(best)]))
                best = g;
        }
        const int q = plan.q_set[static_cast<std::size_t>(qi)];
        res.w1_star[q] = plan.w1_grid[static_cast<std::size_t>(best)];
        res.designs.emplace(q, res.grid_designs[static_cast<std::size_t>(best)]);
    }
    return res;
}

}  // namespace tcard
