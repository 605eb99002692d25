#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcard/rng.hpp"

#include "tcard/balance.hpp"
#include "tcard/criteria.hpp"
#include "tcard/info_matrix.hpp"
#include "tcard/optimizer.hpp"
#include "tcard/report.hpp"
#include "tcard/screening.hpp"
#include "tcard/tuning.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> g_argv;

void emit_manifest(const std::string& command, std::uint64_t seed,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs, double wall_ms,
                   const std::string& path) {
    tcard::ManifestInput m;
    m.command = command;
    m.args = g_argv;
    m.seed = seed;
    m.input_files = inputs;
    m.output_files = outputs;
    m.wall_clock_ms = wall_ms;
    tcard::write_json(tcard::run_manifest(m), path);
}

struct ConstructOpts {
    int n = 0, p = 0, k = 0;
    std::string method = "ce";
    std::string criterion = "phi-bcd";
    double w1 = 1.0, w2 = 1.0, t = 15.0;
    int restarts = 20, max_sweeps = 200, threads = 1, candidate_cap = 0;
    bool random_start = false;
    std::uint64_t seed = 0;
    std::string out = "design.csv";
    std::string report;
};

int run_construct(const ConstructOpts& o) {
    const auto start = Clock::now();
    if (o.n < 1 || o.p < 1)
        throw tcard::InfeasibleError("need positive run and factor counts, got n=" +
                                     std::to_string(o.n) + " p=" + std::to_string(o.p));
    const bool boundary = o.method == "k2" || o.method == "k-pm1";
    if (!boundary && (o.k < 1 || o.k > o.p))
        throw tcard::InfeasibleError("cardinality k must satisfy 1 <= k <= p, got k=" +
                                     std::to_string(o.k) + " p=" + std::to_string(o.p));
    tcard::Design design;
    if (o.method == "ce") {
        tcard::CeConfig cfg;
        cfg.restarts = o.restarts;
        cfg.max_sweeps = o.max_sweeps;
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        cfg.candidate_cap = o.candidate_cap;
        cfg.random_start = o.random_start;
        cfg.criterion = tcard::parse_criterion(o.criterion, {o.w1, o.w2}, o.t);
        design = tcard::ce_optimize(o.n, o.p, o.k, cfg).first;
    } else if (o.method == "greedy-rep") {
        design = tcard::greedy_rep(o.n, o.p, o.k, o.seed);
    } else if (o.method == "greedy-rep-pair") {
        design = tcard::greedy_rep_pair(o.n, o.p, o.k, o.seed);
    } else if (o.method == "random") {
        design = tcard::random_tcard(o.n, o.p, o.k, o.seed);
    } else if (o.method == "k2") {
        if (o.k != 0 && o.k != 2)
            throw tcard::InfeasibleError("method k2 builds designs with k=2, got --k " +
                                         std::to_string(o.k));
        design = tcard::construct_k2(o.n, o.p, o.seed);
    } else if (o.method == "k-pm1") {
        if (o.k != 0 && o.k != o.p - 1)
            throw tcard::InfeasibleError("method k-pm1 builds designs with k=p-1, got --k " +
                                         std::to_string(o.k));
        design = tcard::construct_k_pm1(o.n, o.p);
    } else {
        throw tcard::ValidationError("unknown method: " + o.method);
    }

    tcard::save_design_csv(design, o.out);
    tcard::write_json(tcard::design_sidecar(design, o.seed, "construct --method " + o.method),
                      o.out + ".json");
    std::vector<std::string> outputs{o.out, o.out + ".json"};
    if (!o.report.empty()) {
        json rep = tcard::diagnostics_report(design, {o.w1, o.w2}, o.t);
        rep["method"] = o.method;
        rep["criterion"] = o.criterion;
        rep["seed"] = o.seed;
        tcard::write_json(rep, o.report);
        outputs.push_back(o.report);
    }
    emit_manifest("construct", o.seed, {}, outputs, ms_since(start), o.out + ".manifest.json");
    std::cout << "wrote " << o.out << " (n=" << design.n << " p=" << design.p
              << " k=" << design.k << ")\n";
    return 0;
}

struct EvaluateOpts {
    std::string design;
    std::vector<int> q_list{3, 4, 5};
    std::vector<double> alpha_list{0.01, 1.0, 100.0};
    double rho = 0.5;
    double w1 = 1.0, w2 = 1.0, t = 15.0;
    int proj_subsets = 500;
    std::uint64_t seed = 0;
    std::string out = "report.json";
};

int run_evaluate(const EvaluateOpts& o) {
    const auto start = Clock::now();
    const tcard::Design design = tcard::load_design_csv(o.design);
    json rep;
    rep["schema_version"] = tcard::kSchemaVersion;
    rep["design_file"] = o.design;
    rep["criteria"] = tcard::diagnostics_report(design, {o.w1, o.w2}, o.t);
    rep["spectral"] =
        tcard::spectral_report(design, o.alpha_list, o.rho, o.q_list, o.proj_subsets, o.seed);
    rep["balance"] = tcard::balance_report(design);
    tcard::write_json(rep, o.out);
    emit_manifest("evaluate", o.seed, {o.design}, {o.out}, ms_since(start),
                  o.out + ".manifest.json");
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

int run_check_balance(const std::string& design_path, const std::string& out_path) {
    const auto start = Clock::now();
    const tcard::Design design = tcard::load_design_csv(design_path);
    const json rep = tcard::balance_report(design);
    if (out_path.empty()) {
        std::cout << rep.dump(2) << "\n";
    } else {
        tcard::write_json(rep, out_path);
        emit_manifest("check-balance", 0, {design_path}, {out_path}, ms_since(start),
                      out_path + ".manifest.json");
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

struct ScreenOpts {
    std::string design;
    int q = 3;
    double nu = 1.0, mu = 0.0, sigma = 1.0;
    int reps = 50;
    std::uint64_t seed = 0;
    std::string out = "screen.json";
};

int run_screen(const ScreenOpts& o) {
    const auto start = Clock::now();
    const tcard::Design design = tcard::load_design_csv(o.design);
    tcard::ScreeningScenario sc;
    sc.q = o.q;
    sc.nu = o.nu;
    sc.mu = o.mu;
    sc.sigma = o.sigma;
    sc.seed = o.seed;
    const auto metrics = tcard::run_screening(design, sc, o.reps);
    json rep;
    rep["schema_version"] = tcard::kSchemaVersion;
    rep["q"] = o.q;
    rep["nu"] = o.nu;
    rep["mu"] = o.mu;
    rep["sigma"] = o.sigma;
    rep["reps"] = o.reps;
    rep["seed"] = o.seed;
    rep["precision"] = metrics.precision;
    rep["recall"] = metrics.recall;
    rep["f1"] = metrics.f1;
    rep["mse_mu"] = metrics.mse_mu;
    tcard::write_json(rep, o.out);
    emit_manifest("screen", o.seed, {o.design}, {o.out}, ms_since(start),
                  o.out + ".manifest.json");
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

struct TuneOpts {
    int n = 0, p = 0, k = 0;
    std::string plan;
    std::string out = "tuning.json";
};

int run_tune(const TuneOpts& o) {
    const auto start = Clock::now();
    const json plan_json = tcard::read_json(o.plan);
    tcard::TuningPlan plan;
    if (plan_json.contains("w1_grid")) {
        plan.w1_grid = plan_json.at("w1_grid").get<std::vector<double>>();
    } else {
        // default: 9 log-spaced points over [1e-2, 1e2]
        for (int g = 0; g < 9; ++g) plan.w1_grid.push_back(std::pow(10.0, -2.0 + 0.5 * g));
    }
    plan.q_set = plan_json.at("q_set").get<std::vector<int>>();
    for (const auto& h : plan_json.at("scenarios"))
        plan.scenarios.push_back({h.at("nu").get<double>(), h.at("sigma").get<double>(),
                                  h.value("mu", 0.0), h.value("weight", 1.0)});
    plan.mc_reps = plan_json.value("mc_reps", 20);
    plan.epsilon = plan_json.value("epsilon", 1e-8);
    plan.seed = plan_json.value("seed", 0ULL);
    if (plan_json.contains("ce")) {
        const auto& ce = plan_json.at("ce");
        plan.ce.restarts = ce.value("restarts", 20);
        plan.ce.max_sweeps = ce.value("max_sweeps", 200);
        plan.ce.seed = ce.value("seed", 0ULL);
        plan.ce.threads = ce.value("threads", 1);
    }
    const auto result = tcard::tune_w1(o.n, o.p, o.k, plan);

    json rep;
    rep["schema_version"] = tcard::kSchemaVersion;
    rep["w1_grid"] = result.w1_grid;
    rep["q_set"] = result.q_set;
    rep["score_table"] = result.score_table;  // [q][h][g]
    rep["z_table"] = result.z_table;
    rep["mu_q"] = result.mu_q;
    json stars = json::object();
    for (const auto& [q, w1] : result.w1_star) stars[std::to_string(q)] = w1;
    rep["w1_star"] = stars;
    json designs = json::object();
    for (const auto& [q, design] : result.designs) {
        json rows = json::array();
        for (const auto& row : design.rows) rows.push_back(row);
        designs[std::to_string(q)] = {{"n", design.n}, {"p", design.p}, {"k", design.k},
                                      {"rows", rows}};
    }
    rep["designs"] = designs;
    tcard::write_json(rep, o.out);
    emit_manifest("tune", plan.seed, {o.plan}, {o.out}, ms_since(start),
                  o.out + ".manifest.json");
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

struct BenchmarkOpts {
    std::vector<int> p_list{20};
    std::vector<double> n_ratio{1.5};
    std::vector<double> k_ratio{0.25};
    std::vector<std::string> methods{"ce-phi-bcd", "random"};
    int reps = 5;
    int restarts = 10, max_sweeps = 200, threads = 1;
    std::uint64_t seed = 0;
    std::vector<int> q_list{3, 4, 5};
    int proj_subsets = 200;
    std::string out = "benchmark.csv";
};

tcard::Design benchmark_design(const std::string& method, int n, int p, int k,
                               std::uint64_t seed, const BenchmarkOpts& o) {
    if (method == "random") return tcard::random_tcard(n, p, k, seed);
    if (method == "greedy-rep") return tcard::greedy_rep(n, p, k, seed);
    if (method == "greedy-rep-pair") return tcard::greedy_rep_pair(n, p, k, seed);
    std::string criterion = method;
    if (criterion.rfind("ce-", 0) == 0) criterion = criterion.substr(3);
    tcard::CeConfig cfg;
    cfg.restarts = o.restarts;
    cfg.max_sweeps = o.max_sweeps;
    cfg.seed = seed;
    cfg.threads = 1;
    cfg.criterion = tcard::parse_criterion(criterion, {1.0, 1.0}, 15.0);
    return tcard::ce_optimize(n, p, k, cfg).first;
}

struct BenchmarkJob {
    int p = 0, n = 0, k = 0;
    double nr = 0.0, kr = 0.0;
    std::string method;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string rows;  // rendered CSV lines
};

void run_benchmark_job(BenchmarkJob& job, const BenchmarkOpts& o) {
    const auto t0 = Clock::now();
    const auto design = benchmark_design(job.method, job.n, job.p, job.k, job.seed, o);
    const double elapsed = ms_since(t0);
    const auto counts = tcard::compute_counts(design);
    const auto gwlp = tcard::gwlp_b1_b2(counts);
    std::ostringstream os;
    auto emit = [&](const std::string& metric, double value) {
        os << job.p << ',' << job.n << ',' << job.k << ',' << job.nr << ',' << job.kr << ','
           << job.method << ',' << job.rep << ',' << metric << ',' << value << '\n';
    };
    emit("v1", tcard::v1(counts));
    emit("v2", tcard::v2(counts));
    emit("b1_eff", gwlp.b1_eff);
    emit("b2_eff", gwlp.b2_eff);
    emit("runtime_ms", elapsed);
    for (int q : o.q_list) {
        if (q < 2 || q > job.p) continue;
        const auto pl = tcard::projected_logdet(
            design, q, o.proj_subsets, tcard::derive_seed(job.seed, static_cast<std::uint64_t>(q)));
        emit("proj_logdet_q" + std::to_string(q), pl.mean);
    }
    job.rows = os.str();
}

int run_benchmark(const BenchmarkOpts& o) {
    const auto start = Clock::now();
    if (o.p_list.empty() || o.n_ratio.empty() || o.k_ratio.empty() || o.methods.empty() ||
        o.reps < 1)
        throw tcard::ValidationError("benchmark: empty grid");

    std::vector<BenchmarkJob> jobs;
    for (int p : o.p_list) {
        for (double nr : o.n_ratio) {
            for (double kr : o.k_ratio) {
                const int n = static_cast<int>(nr * p);
                const int k = std::max(1, static_cast<int>(kr * p));
                if (k > p) continue;
                for (const auto& method : o.methods) {
                    for (int rep = 0; rep < o.reps; ++rep) {
                        BenchmarkJob job;
                        job.p = p;
                        job.n = n;
                        job.k = k;
                        job.nr = nr;
                        job.kr = kr;
                        job.method = method;
                        job.rep = rep;
                        // seeds aligned across methods within a replicate
                        job.seed = tcard::derive_seed(
                            o.seed, static_cast<std::uint64_t>(p * 1000 + rep),
                            static_cast<std::uint64_t>(n * 1000 + k));
                        jobs.push_back(std::move(job));
                    }
                }
            }
        }
    }
    if (jobs.empty()) throw tcard::ValidationError("benchmark: empty grid");

    const int threads = std::max(1, o.threads);
    if (threads == 1) {
        for (auto& job : jobs) run_benchmark_job(job, o);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t idx = next.fetch_add(1);
                    if (idx >= jobs.size()) return;
                    run_benchmark_job(jobs[idx], o);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // output writing is serialized and ordered by the job list, so the file
    // is identical regardless of thread count (runtimes aside)
    std::ofstream out(o.out);
    if (!out) throw tcard::IoError("cannot open " + o.out);
    out << "p,n,k,n_ratio,k_ratio,method,rep,metric,value\n";
    for (const auto& job : jobs) out << job.rows;
    out.close();
    emit_manifest("benchmark", o.seed, {}, {o.out}, ms_since(start), o.out + ".manifest.json");
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) g_argv.emplace_back(argv[i]);

    CLI::App app{"Construction, certification, and evaluation of two-level designs with a fixed "
                 "number of active factors per run"};
    app.require_subcommand(1);

    ConstructOpts c;
    auto* construct = app.add_subcommand("construct", "Build a design and write it as CSV");
    construct->add_option("--n", c.n, "run count")->required();
    construct->add_option("--p", c.p, "factor count")->required();
    construct->add_option("--k", c.k, "active factors per run (optional for k2/k-pm1)");
    construct->add_option("--method", c.method, "ce|greedy-rep|greedy-rep-pair|random|k2|k-pm1");
    construct->add_option("--criterion", c.criterion,
                          "phi-bcd|v1|v2|ue-s2|morris-mitchell|maximin|minimax");
    construct->add_option("--w1", c.w1, "replication-imbalance weight");
    construct->add_option("--w2", c.w2, "concurrence-dispersion weight");
    construct->add_option("--t", c.t, "Morris-Mitchell exponent");
    construct->add_option("--restarts", c.restarts);
    construct->add_option("--max-sweeps", c.max_sweeps);
    construct->add_option("--candidate-cap", c.candidate_cap,
                          "random candidate swaps examined per row (0 = all)");
    construct->add_flag("--random-start", c.random_start);
    construct->add_option("--threads", c.threads);
    construct->add_option("--seed", c.seed);
    construct->add_option("--out", c.out);
    construct->add_option("--report", c.report, "also write a diagnostics JSON");

    EvaluateOpts e;
    auto* evaluate = app.add_subcommand("evaluate", "Full diagnostics for a design file");
    evaluate->add_option("--design", e.design)->required();
    evaluate->add_option("--q-list", e.q_list, "projection orders");
    evaluate->add_option("--alpha-list", e.alpha_list, "Bayes-D prior precisions");
    evaluate->add_option("--rho", e.rho, "gap bound contraction factor");
    evaluate->add_option("--w1", e.w1);
    evaluate->add_option("--w2", e.w2);
    evaluate->add_option("--t", e.t);
    evaluate->add_option("--proj-subsets", e.proj_subsets);
    evaluate->add_option("--seed", e.seed);
    evaluate->add_option("--out", e.out);

    std::string cb_design, cb_out;
    auto* check = app.add_subcommand("check-balance", "Near-balance certificate for a design");
    check->add_option("--design", cb_design)->required();
    check->add_option("--out", cb_out, "write JSON here instead of stdout");

    ScreenOpts s;
    auto* screen = app.add_subcommand("screen", "Monte Carlo screening evaluation of a design");
    screen->add_option("--design", s.design)->required();
    screen->add_option("--q", s.q);
    screen->add_option("--nu", s.nu);
    screen->add_option("--mu", s.mu);
    screen->add_option("--sigma", s.sigma);
    screen->add_option("--reps", s.reps);
    screen->add_option("--seed", s.seed);
    screen->add_option("--out", s.out);

    TuneOpts t;
    auto* tune = app.add_subcommand("tune", "Simulation-based calibration of w1");
    tune->add_option("--n", t.n)->required();
    tune->add_option("--p", t.p)->required();
    tune->add_option("--k", t.k)->required();
    tune->add_option("--plan", t.plan, "plan JSON")->required();
    tune->add_option("--out", t.out);

    BenchmarkOpts b;
    auto* bench = app.add_subcommand("benchmark", "Method comparison grid, long-format CSV");
    bench->add_option("--p", b.p_list);
    bench->add_option("--n-ratio", b.n_ratio);
    bench->add_option("--k-ratio", b.k_ratio);
    bench->add_option("--methods", b.methods);
    bench->add_option("--reps", b.reps);
    bench->add_option("--restarts", b.restarts);
    bench->add_option("--max-sweeps", b.max_sweeps);
    bench->add_option("--threads", b.threads);
    bench->add_option("--seed", b.seed);
    bench->add_option("--q-list", b.q_list);
    bench->add_option("--proj-subsets", b.proj_subsets);
    bench->add_option("--out", b.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*construct) return run_construct(c);
        if (*evaluate) return run_evaluate(e);
        if (*check) return run_check_balance(cb_design, cb_out);
        if (*screen) return run_screen(s);
        if (*tune) return run_tune(t);
        if (*bench) return run_benchmark(b);
    } catch (const tcard::ValidationError& ex) {
        std::cerr << "validation error: " << ex.what() << "\n";
        return 2;
    } catch (const tcard::InfeasibleError& ex) {
        std::cerr << "infeasible: " << ex.what() << "\n";
        return 3;
    } catch (const tcard::IoError& ex) {
        std::cerr << "io error: " << ex.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& ex) {
        std::cerr << "io error: " << ex.what() << "\n";
        return 4;
    }
    return 1;
}
