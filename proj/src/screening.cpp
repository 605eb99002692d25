#include "tcard/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcard/linalg.hpp"
#include "tcard/rng.hpp"

namespace tcard {

SimulatedResponse simulate_response(const Design& x, const ScreeningScenario& sc) {
    if (sc.q < 1 || sc.q > x.p)
        throw ValidationError("simulate_response: q must satisfy 1 <= q <= p");
    if (sc.sigma < 0.0) throw ValidationError("simulate_response: sigma must be nonnegative");
    Rng rng(sc.seed);
    SimulatedResponse out;
    const auto subset = rng.k_subset(x.p, sc.q);
    out.active.insert(subset.begin(), subset.end());
    out.mu_true.resize(static_cast<std::size_t>(x.n));
    out.y.resize(static_cast<std::size_t>(x.n));
    for (int i = 0; i < x.n; ++i) {
        double mean = sc.mu;
        for (int j : x.rows[static_cast<std::size_t>(i)])
            if (out.active.count(j)) mean += sc.nu;
        out.mu_true[static_cast<std::size_t>(i)] = mean;
        out.y[static_cast<std::size_t>(i)] = mean + (sc.sigma > 0.0 ? sc.sigma * rng.normal() : 0.0);
    }
    return out;
}

std::vector<double> lasso_coordinate_descent(const std::vector<double>& x_std, int n, int m,
                                             const std::vector<double>& y_centered, double lambda,
                                             std::vector<double> beta) {
    // minimize (1/2n)||y - X b||^2 + lambda ||b||_1 with columns scaled to
    // mean-square 1, so each update is a univariate soft-threshold.
    if (static_cast<int>(beta.size()) != m) beta.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<double> residual(y_centered);
    for (int j = 0; j < m; ++j) {
        if (beta[static_cast<std::size_t>(j)] == 0.0) continue;
        for (int i = 0; i < n; ++i)
            residual[static_cast<std::size_t>(i)] -=
                x_std[static_cast<std::size_t>(i) * m + j] * beta[static_cast<std::size_t>(j)];
    }
    const int max_iter = 1000;
    for (int iter = 0; iter < max_iter; ++iter) {
        double max_change = 0.0;
        for (int j = 0; j < m; ++j) {
            const double old = beta[static_cast<std::size_t>(j)];
            double rho = 0.0;
            for (int i = 0; i < n; ++i)
                rho += x_std[static_cast<std::size_t>(i) * m + j] *
                       residual[static_cast<std::size_t>(i)];
            rho = rho / n + old;  // columns have (1/n) x^T x = 1
            double next = 0.0;
            if (rho > lambda)
                next = rho - lambda;
            else if (rho < -lambda)
                next = rho + lambda;
            if (next != old) {
                const double diff = next - old;
                for (int i = 0; i < n; ++i)
                    residual[static_cast<std::size_t>(i)] -=
                        x_std[static_cast<std::size_t>(i) * m + j] * diff;
                beta[static_cast<std::size_t>(j)] = next;
                max_change = std::max(max_change, std::abs(diff));
            }
        }
        if (max_change < 1e-10) break;
    }
    return beta;
}

namespace {

struct Standardized {
    int n = 0;
    int m = 0;                    // columns kept
    std::vector<int> kept;        // original column index per kept column
    std::vector<double> x;        // n*m standardized
    std::vector<double> mean;     // per kept column, original scale
    std::vector<double> scale;    // per kept column
    std::vector<double> y;        // centered
    double y_mean = 0.0;
};

Standardized standardize(const std::vector<double>& raw, int n, int p,
                         const std::vector<double>& y) {
    Standardized s;
    s.n = n;
    s.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    s.y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - s.y_mean;
    for (int j = 0; j < p; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += raw[static_cast<std::size_t>(i) * p + j];
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = raw[static_cast<std::size_t>(i) * p + j] - mean;
            var += d * d;
        }
        const double scale = std::sqrt(var / n);
        if (scale < 1e-12) continue;  // constant column: dropped, never selected
        s.kept.push_back(j);
        s.mean.push_back(mean);
        s.scale.push_back(scale);
    }
    s.m = static_cast<int>(s.kept.size());
    s.x.resize(static_cast<std::size_t>(n) * s.m);
    for (int c = 0; c < s.m; ++c) {
        const int j = s.kept[static_cast<std::size_t>(c)];
        for (int i = 0; i < n; ++i)
            s.x[static_cast<std::size_t>(i) * s.m + c] =
                (raw[static_cast<std::size_t>(i) * p + j] - s.mean[static_cast<std::size_t>(c)]) /
                s.scale[static_cast<std::size_t>(c)];
    }
    return s;
}

std::vector<double> lambda_grid(const Standardized& s, int n_lambda, double min_ratio) {
    double lmax = 0.0;
    for (int c = 0; c < s.m; ++c) {
        double dot = 0.0;
        for (int i = 0; i < s.n; ++i)
            dot += s.x[static_cast<std::size_t>(i) * s.m + c] * s.y[static_cast<std::size_t>(i)];
        lmax = std::max(lmax, std::abs(dot) / s.n);
    }
    std::vector<double> grid;
    if (lmax <= 0.0) return grid;
    grid.reserve(static_cast<std::size_t>(n_lambda));
    const double lmin = lmax * min_ratio;
    for (int g = 0; g < n_lambda; ++g) {
        const double t = n_lambda == 1 ? 0.0 : static_cast<double>(g) / (n_lambda - 1);
        grid.push_back(lmax * std::pow(lmin / lmax, t));
    }
    return grid;
}

// Path fit with warm starts along a descending grid.
std::vector<std::vector<double>> lasso_path(const Standardized& s,
                                            const std::vector<double>& grid) {
    std::vector<std::vector<double>> path;
    path.reserve(grid.size());
    std::vector<double> warm(static_cast<std::size_t>(s.m), 0.0);
    for (double lambda : grid) {
        warm = lasso_coordinate_descent(s.x, s.n, s.m, s.y, lambda, warm);
        path.push_back(warm);
    }
    return path;
}

struct Refit {
    std::set<int> selected;
    std::vector<double> coef;  // original scale, length p
    double intercept = 0.0;
    std::vector<double> fitted;
    double rss = 0.0;
    double bic = 0.0;
};

Refit refit_ols(const std::vector<double>& raw, int n, int p, const std::vector<double>& y,
                const std::set<int>& support) {
    Refit out;
    out.selected = support;
    out.coef.assign(static_cast<std::size_t>(p), 0.0);
    const int m = static_cast<int>(support.size());
    std::vector<int> cols(support.begin(), support.end());
    // design with intercept column
    std::vector<double> a(static_cast<std::size_t>(n) * (m + 1));
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i) * (m + 1)] = 1.0;
        for (int c = 0; c < m; ++c)
            a[static_cast<std::size_t>(i) * (m + 1) + c + 1] =
                raw[static_cast<std::size_t>(i) * p + cols[static_cast<std::size_t>(c)]];
    }
    const auto b = least_squares(a, n, m + 1, y);
    out.intercept = b[0];
    for (int c = 0; c < m; ++c)
        out.coef[static_cast<std::size_t>(cols[static_cast<std::size_t>(c)])] = b[static_cast<std::size_t>(c) + 1];
    out.fitted.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double f = out.intercept;
        for (int c = 0; c < m; ++c)
            f += a[static_cast<std::size_t>(i) * (m + 1) + c + 1] * b[static_cast<std::size_t>(c) + 1];
        out.fitted[static_cast<std::size_t>(i)] = f;
        const double r = y[static_cast<std::size_t>(i)] - f;
        out.rss += r * r;
    }
    out.bic = n * std::log(std::max(out.rss, 1e-300) / n) +
              static_cast<double>(m) * std::log(static_cast<double>(n));
    return out;
}

}  // namespace

FitResult lasso_fit_pipeline(const Design& x, const std::vector<double>& y,
                             const LassoConfig& config) {
    const int n = x.n;
    const int p = x.p;
    if (static_cast<int>(y.size()) != n)
        throw ValidationError("lasso_fit_pipeline: response length != n");
    if (n < 3) throw ValidationError("lasso_fit_pipeline: needs n >= 3");

    std::vector<double> raw(static_cast<std::size_t>(n) * p, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j : x.rows[static_cast<std::size_t>(i)])
            raw[static_cast<std::size_t>(i) * p + j] = 1.0;

    const Standardized s = standardize(raw, n, p, y);
    const auto grid = lambda_grid(s, config.n_lambda, config.lambda_min_ratio);
    FitResult best;
    if (grid.empty() || s.m == 0) {
        // nothing to explain: empty model
        const auto refit = refit_ols(raw, n, p, y, {});
        best.selected = {};
        best.coefficients = refit.coef;
        best.intercept = refit.intercept;
        best.fitted_mean = refit.fitted;
        best.bic = refit.bic;
        best.lasso_lambda = 0.0;
        return best;
    }

    // 5-fold CV over the same grid: seeded permutation, round-robin folds.
    const int folds = std::min(config.cv_folds, n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(config.seed, 0x11));
    rng.shuffle(perm);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i % folds;

    const int g_count = static_cast<int>(grid.size());
    std::vector<std::vector<double>> fold_mse(static_cast<std::size_t>(folds),
                                              std::vector<double>(static_cast<std::size_t>(g_count), 0.0));
    for (int f = 0; f < folds; ++f) {
        std::vector<double> raw_tr, y_tr, raw_va, y_va;
        int n_tr = 0, n_va = 0;
        for (int i = 0; i < n; ++i) {
            if (fold_of[static_cast<std::size_t>(i)] == f) {
                for (int j = 0; j < p; ++j) raw_va.push_back(raw[static_cast<std::size_t>(i) * p + j]);
                y_va.push_back(y[static_cast<std::size_t>(i)]);
                ++n_va;
            } else {
                for (int j = 0; j < p; ++j) raw_tr.push_back(raw[static_cast<std::size_t>(i) * p + j]);
                y_tr.push_back(y[static_cast<std::size_t>(i)]);
                ++n_tr;
            }
        }
        if (n_tr == 0 || n_va == 0) continue;
        const Standardized st = standardize(raw_tr, n_tr, p, y_tr);
        const auto path = lasso_path(st, grid);
        for (int g = 0; g < g_count; ++g) {
            double mse = 0.0;
            for (int i = 0; i < n_va; ++i) {
                double pred = st.y_mean;
                for (int c = 0; c < st.m; ++c) {
                    const int j = st.kept[static_cast<std::size_t>(c)];
                    const double xs = (raw_va[static_cast<std::size_t>(i) * p + j] -
                                       st.mean[static_cast<std::size_t>(c)]) /
                                      st.scale[static_cast<std::size_t>(c)];
                    pred += xs * path[static_cast<std::size_t>(g)][static_cast<std::size_t>(c)];
                }
                const double r = y_va[static_cast<std::size_t>(i)] - pred;
                mse += r * r;
            }
            fold_mse[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)] = mse / n_va;
        }
    }
    std::vector<double> cv_mean(static_cast<std::size_t>(g_count), 0.0);
    std::vector<double> cv_se(static_cast<std::size_t>(g_count), 0.0);
    for (int g = 0; g < g_count; ++g) {
        double m = 0.0;
        for (int f = 0; f < folds; ++f) m += fold_mse[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)];
        m /= folds;
        double var = 0.0;
        for (int f = 0; f < folds; ++f) {
            const double d = fold_mse[static_cast<std::size_t>(f)][static_cast<std::size_t>(g)] - m;
            var += d * d;
        }
        cv_mean[static_cast<std::size_t>(g)] = m;
        cv_se[static_cast<std::size_t>(g)] = folds > 1 ? std::sqrt(var / (folds - 1) / folds) : 0.0;
    }
    int g_min = 0;
    for (int g = 1; g < g_count; ++g)
        if (cv_mean[static_cast<std::size_t>(g)] < cv_mean[static_cast<std::size_t>(g_min)]) g_min = g;
    const double keep_level = cv_mean[static_cast<std::size_t>(g_min)] + cv_se[static_cast<std::size_t>(g_min)];

    // Full-data path; refit every retained lambda and keep the BIC best.
    const auto path = lasso_path(s, grid);
    bool have_best = false;
    for (int g = 0; g < g_count; ++g) {
        if (cv_mean[static_cast<std::size_t>(g)] > keep_level) continue;
        const auto& beta = path[static_cast<std::size_t>(g)];
        double max_abs = 0.0;
        for (double b : beta) max_abs = std::max(max_abs, std::abs(b));
        std::set<int> support;
        for (int c = 0; c < s.m; ++c) {
            double b = beta[static_cast<std::size_t>(c)];
            if (std::abs(b) < config.truncate_ratio * max_abs) b = 0.0;
            if (config.truncate_negative && b < 0.0) b = 0.0;
            if (b != 0.0) support.insert(s.kept[static_cast<std::size_t>(c)]);
        }
        const auto refit = refit_ols(raw, n, p, y, support);
        if (!have_best || refit.bic < best.bic) {
            have_best = true;
            best.selected = refit.selected;
            best.coefficients = refit.coef;
            best.intercept = refit.intercept;
            best.fitted_mean = refit.fitted;
            best.bic = refit.bic;
            best.lasso_lambda = grid[static_cast<std::size_t>(g)];
        }
    }
    if (!have_best) {
        const auto refit = refit_ols(raw, n, p, y, {});
        best.selected = {};
        best.coefficients = refit.coef;
        best.intercept = refit.intercept;
        best.fitted_mean = refit.fitted;
        best.bic = refit.bic;
        best.lasso_lambda = grid.front();
    }
    return best;
}

ScreeningMetrics screening_metrics(const std::set<int>& selected, const std::set<int>& truth,
                                   const std::vector<double>& fitted_mean,
                                   const std::vector<double>& mu_true) {
    if (truth.empty()) throw ValidationError("screening_metrics: empty truth set");
    if (fitted_mean.size() != mu_true.size())
        throw ValidationError("screening_metrics: fitted/true mean length mismatch");
    ScreeningMetrics m;
    int hit = 0;
    for (int j : selected)
        if (truth.count(j)) ++hit;
    m.precision = static_cast<double>(hit) / std::max<std::size_t>(selected.size(), 1);
    m.recall = static_cast<double>(hit) / truth.size();
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_true.size(); ++i) {
        const double d = fitted_mean[i] - mu_true[i];
        acc += d * d;
    }
    m.mse_mu = mu_true.empty() ? 0.0 : acc / mu_true.size();
    return m;
}

ScreeningMetrics run_screening(const Design& x, const ScreeningScenario& scenario, int reps) {
    if (reps < 1) throw ValidationError("run_screening: reps must be at least 1");
    ScreeningMetrics mean;
    for (int b = 0; b < reps; ++b) {
        ScreeningScenario sc = scenario;
        sc.seed = derive_seed(scenario.seed, static_cast<std::uint64_t>(b));
        const auto sim = simulate_response(x, sc);
        LassoConfig lc;
        lc.seed = derive_seed(sc.seed, 0x77);
        const auto fit = lasso_fit_pipeline(x, sim.y, lc);
        const auto m = screening_metrics(fit.selected, sim.active, fit.fitted_mean, sim.mu_true);
        mean.precision += m.precision;
        mean.recall += m.recall;
        mean.f1 += m.f1;
        mean.mse_mu += m.mse_mu;
    }
    mean.precision /= reps;
    mean.recall /= reps;
    mean.f1 /= reps;
    mean.mse_mu /= reps;
    return mean;
}

}  // namespace tcard
