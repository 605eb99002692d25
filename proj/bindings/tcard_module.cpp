#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcard/balance.hpp"
#include "tcard/criteria.hpp"
#include "tcard/info_matrix.hpp"
#include "tcard/optimizer.hpp"
#include "tcard/screening.hpp"
#include "tcard/tuning.hpp"

namespace py = pybind11;
using namespace tcard;

namespace {

py::list matrix_rows(const std::vector<int>& flat, int rows, int cols) {
    py::list out;
    for (int i = 0; i < rows; ++i) {
        py::list row;
        for (int j = 0; j < cols; ++j)
            row.append(flat[static_cast<std::size_t>(i) * cols + j]);
        out.append(row);
    }
    return out;
}

py::list matrix_rows(const std::vector<double>& flat, int rows, int cols) {
    py::list out;
    for (int i = 0; i < rows; ++i) {
        py::list row;
        for (int j = 0; j < cols; ++j)
            row.append(flat[static_cast<std::size_t>(i) * cols + j]);
        out.append(row);
    }
    return out;
}

CriterionSpec make_spec(const std::string& name, double w1, double w2, double t) {
    return parse_criterion(name, Weights{w1, w2}, t);
}

}  // namespace

PYBIND11_MODULE(_tcard, m) {
    m.doc() = "Two-level designs with a fixed number of active factors per run: "
              "construction, certification, and evaluation.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<Design>(m, "Design")
        .def_readonly("n", &Design::n)
        .def_readonly("p", &Design::p)
        .def_readonly("k", &Design::k)
        .def_property_readonly("rows", [](const Design& d) { return d.rows; })
        .def("dense", [](const Design& d) {
            const auto bits = d.dense();
            py::list out;
            for (int i = 0; i < d.n; ++i) {
                py::list row;
                for (int j = 0; j < d.p; ++j)
                    row.append(static_cast<int>(bits[static_cast<std::size_t>(i) * d.p + j]));
                out.append(row);
            }
            return out;
        })
        .def("__repr__", [](const Design& d) {
            return "Design(n=" + std::to_string(d.n) + ", p=" + std::to_string(d.p) +
                   ", k=" + std::to_string(d.k) + ")";
        });

    m.def("make_design", &make_design, py::arg("n"), py::arg("p"), py::arg("k"), py::arg("rows"));
    m.def("random_tcard", &random_tcard, py::arg("n"), py::arg("p"), py::arg("k"), py::arg("seed"));
    m.def("load_design_csv", &load_design_csv, py::arg("path"));
    m.def("save_design_csv", &save_design_csv, py::arg("design"), py::arg("path"));

    py::class_<Counts>(m, "Counts")
        .def_readonly("n", &Counts::n)
        .def_readonly("p", &Counts::p)
        .def_readonly("k", &Counts::k)
        .def_readonly("r", &Counts::r)
        .def_property_readonly("lam",
                               [](const Counts& c) { return matrix_rows(c.lambda, c.p, c.p); })
        .def_readonly("sum_r_sq", &Counts::sum_r_sq)
        .def_readonly("sum_lambda_sq", &Counts::sum_lambda_sq)
        .def_property_readonly("r_bar", &Counts::r_bar)
        .def_property_readonly("lambda_bar", &Counts::lambda_bar);
    m.def("compute_counts", &compute_counts, py::arg("design"));

    m.def("v1", &v1);
    m.def("v2", &v2);
    m.def("phi_bcd",
          [](const Counts& c, double w1, double w2) { return phi_bcd(c, Weights{w1, w2}); },
          py::arg("counts"), py::arg("w1") = 1.0, py::arg("w2") = 1.0);
    m.def("ue_s2", &ue_s2, py::arg("design"));
    m.def("ue_s2_from_counts", &ue_s2_from_counts, py::arg("counts"));
    m.def("gwlp_b1_b2", [](const Counts& c) {
        const auto g = gwlp_b1_b2(c);
        py::dict out;
        out["b1"] = g.b1;
        out["b2"] = g.b2;
        out["b1_numerator"] = g.b1_numerator;
        out["b2_numerator"] = g.b2_numerator;
        out["b1_ref"] = g.b1_ref;
        out["b2_ref"] = g.b2_ref;
        out["b1_eff"] = g.b1_eff;
        out["b2_eff"] = g.b2_eff;
        return out;
    });
    m.def("row_overlap_and_distances", [](const Design& d) {
        const auto g = row_overlap_and_distances(d);
        return py::make_tuple(matrix_rows(g.overlap, g.n, g.n), matrix_rows(g.distance, g.n, g.n));
    });
    m.def("morris_mitchell",
          [](const Design& d, double t) { return morris_mitchell(row_overlap_and_distances(d), t); },
          py::arg("design"), py::arg("t") = 15.0);
    m.def("maximin_score",
          [](const Design& d) { return maximin_score(row_overlap_and_distances(d)); });
    m.def("minimax_score",
          [](const Design& d) { return minimax_score(row_overlap_and_distances(d)); });
    m.def("m_stage_thresholds", [](const Design& d) {
        const auto counts = compute_counts(d);
        return m_stage_thresholds(d.n, d.p, d.k, counts);
    });

    m.def("centered_info", [](const Design& d) {
        const auto info = centered_info(compute_counts(d));
        py::dict out;
        out["c"] = matrix_rows(info.c, info.p, info.p);
        out["eigenvalues"] = info.eigenvalues;
        return out;
    });
    m.def("trace_identities", [](const Design& d) { return trace_identities(compute_counts(d)); });
    m.def("bayes_d", [](const Design& d, double alpha) {
        return bayes_d(centered_info(compute_counts(d)), alpha);
    });
    m.def("log_pdet", [](const Design& d) {
        const auto r = log_pdet(centered_info(compute_counts(d)));
        return py::make_tuple(r.value, r.n_below_tol, r.rank_deficient);
    });
    m.def("frobenius_bounds", [](const Design& d) {
        const auto b = frobenius_bounds(compute_counts(d));
        return py::make_tuple(b.lower, b.upper);
    });
    m.def("bayes_d_gap_bound", [](const Design& d, double alpha, double rho) {
        const auto g = bayes_d_gap_bound(compute_counts(d), alpha, rho);
        return py::make_tuple(g.g_alpha, g.bound, g.applicable);
    }, py::arg("design"), py::arg("alpha"), py::arg("rho") = 0.5);
    m.def("projected_logdet", [](const Design& d, int q, int n_subsets, std::uint64_t seed) {
        const auto r = projected_logdet(d, q, n_subsets, seed);
        return py::make_tuple(r.mean, r.n_finite, r.n_degenerate);
    }, py::arg("design"), py::arg("q"), py::arg("n_subsets") = 500, py::arg("seed") = 0);

    m.def("structural_params", [](int n, int p, int k) {
        const auto b = structural_params(n, p, k);
        py::dict out;
        out["f"] = b.f;
        out["s"] = b.s;
        out["kappa"] = b.kappa;
        out["omega"] = b.omega;
        out["regime"] = b.type1 ? "Type I" : "Type II";
        return out;
    });
    m.def("check_nearly_balanced", [](const Design& d) {
        const auto c = check_nearly_balanced(d);
        return py::make_tuple(c.nb1, c.nb2);
    });
    m.def("forced_degrees", [](int n, int p, int k) {
        return forced_degrees(structural_params(n, p, k));
    });
    m.def("erdos_gallai", &erdos_gallai, py::arg("degrees"));
    m.def("is_bibd", [](const Design& d) -> py::object {
        const auto b = is_bibd(d);
        if (!b) return py::none();
        return py::make_tuple(b->p, b->b, b->r, b->k, b->lambda);
    });
    m.def("realize_degrees", [](const std::vector<int>& degrees) -> py::object {
        const auto g = realize_degrees(degrees);
        if (!g) return py::none();
        return py::cast(g->edges);
    });
    m.def("construct_k2", &construct_k2, py::arg("n"), py::arg("p"), py::arg("seed") = 0);
    m.def("construct_k_pm1", &construct_k_pm1, py::arg("n"), py::arg("p"));

    m.def("ce_optimize",
          [](int n, int p, int k, const std::string& criterion, double w1, double w2, double t,
             int restarts, int max_sweeps, std::uint64_t seed, int threads) {
              CeConfig cfg;
              cfg.criterion = make_spec(criterion, w1, w2, t);
              cfg.restarts = restarts;
              cfg.max_sweeps = max_sweeps;
              cfg.seed = seed;
              cfg.threads = threads;
              auto [design, trace] = ce_optimize(n, p, k, cfg);
              py::dict tr;
              tr["restart_objectives"] = trace.restart_objectives;
              tr["restart_sweeps"] = trace.restart_sweeps;
              tr["accepted_swaps"] = trace.accepted_swaps;
              tr["best_restart"] = trace.best_restart;
              tr["best_objective"] = trace.best_objective;
              return py::make_tuple(design, tr);
          },
          py::arg("n"), py::arg("p"), py::arg("k"), py::arg("criterion") = "phi-bcd",
          py::arg("w1") = 1.0, py::arg("w2") = 1.0, py::arg("t") = 15.0,
          py::arg("restarts") = 20, py::arg("max_sweeps") = 200, py::arg("seed") = 0,
          py::arg("threads") = 1);
    m.def("greedy_rep", &greedy_rep, py::arg("n"), py::arg("p"), py::arg("k"), py::arg("seed") = 0);
    m.def("greedy_rep_pair", &greedy_rep_pair, py::arg("n"), py::arg("p"), py::arg("k"),
          py::arg("seed") = 0);

    m.def("simulate_response", [](const Design& d, int q, double nu, double mu, double sigma,
                                  std::uint64_t seed) {
        ScreeningScenario sc{q, nu, mu, sigma, seed};
        const auto r = simulate_response(d, sc);
        return py::make_tuple(r.y, r.active, r.mu_true);
    }, py::arg("design"), py::arg("q"), py::arg("nu") = 1.0, py::arg("mu") = 0.0,
       py::arg("sigma") = 1.0, py::arg("seed") = 0);
    m.def("lasso_fit_pipeline", [](const Design& d, const std::vector<double>& y,
                                   std::uint64_t seed) {
        LassoConfig cfg;
        cfg.seed = seed;
        const auto fit = lasso_fit_pipeline(d, y, cfg);
        py::dict out;
        out["selected"] = fit.selected;
        out["coefficients"] = fit.coefficients;
        out["intercept"] = fit.intercept;
        out["fitted_mean"] = fit.fitted_mean;
        out["bic"] = fit.bic;
        out["lasso_lambda"] = fit.lasso_lambda;
        return out;
    }, py::arg("design"), py::arg("y"), py::arg("seed") = 0);
    m.def("run_screening", [](const Design& d, int q, double nu, double mu, double sigma,
                              std::uint64_t seed, int reps) {
        ScreeningScenario sc{q, nu, mu, sigma, seed};
        const auto r = run_screening(d, sc, reps);
        py::dict out;
        out["precision"] = r.precision;
        out["recall"] = r.recall;
        out["f1"] = r.f1;
        out["mse_mu"] = r.mse_mu;
        return out;
    }, py::arg("design"), py::arg("q"), py::arg("nu") = 1.0, py::arg("mu") = 0.0,
       py::arg("sigma") = 1.0, py::arg("seed") = 0, py::arg("reps") = 20);

    m.def("zscore_standardize", &zscore_standardize, py::arg("scores"), py::arg("epsilon") = 1e-8);
    m.def("tune_w1",
          [](int n, int p, int k, const std::vector<double>& w1_grid, const std::vector<int>& q_set,
             const std::vector<std::tuple<double, double, double>>& scenarios, int mc_reps,
             double epsilon, int restarts, int max_sweeps, std::uint64_t ce_seed,
             std::uint64_t mc_seed) {
              TuningPlan plan;
              plan.w1_grid = w1_grid;
              plan.q_set = q_set;
              for (const auto& [nu, sigma, mu] : scenarios) plan.scenarios.push_back({nu, sigma, mu});
              plan.mc_reps = mc_reps;
              plan.epsilon = epsilon;
              plan.ce.restarts = restarts;
              plan.ce.max_sweeps = max_sweeps;
              plan.ce.seed = ce_seed;
              plan.seed = mc_seed;
              const auto res = tune_w1(n, p, k, plan);
              py::dict out;
              out["score_table"] = res.score_table;
              out["z_table"] = res.z_table;
              out["mu_q"] = res.mu_q;
              out["w1_star"] = res.w1_star;
              py::dict designs;
              for (const auto& [q, design] : res.designs)
                  designs[py::int_(q)] = py::cast(design);
              out["designs"] = designs;
              return out;
          },
          py::arg("n"), py::arg("p"), py::arg("k"), py::arg("w1_grid"), py::arg("q_set"),
          py::arg("scenarios"), py::arg("mc_reps") = 20, py::arg("epsilon") = 1e-8,
          py::arg("restarts") = 10, py::arg("max_sweeps") = 200, py::arg("ce_seed") = 0,
          py::arg("mc_seed") = 0);

    m.attr("__version__") = "0.1.0";
}
