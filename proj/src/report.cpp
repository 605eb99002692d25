#include "tcard/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tcard/criteria.hpp"
#include "tcard/info_matrix.hpp"
#include "tcard/rng.hpp"

namespace tcard {

namespace {

// JSON has no infinity; encode the +inf efficiency flag as a string.
nlohmann::json finite_or_flag(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

nlohmann::json diagnostics_report(const Design& x, const Weights& w, double mm_exponent) {
    const Counts counts = compute_counts(x);
    const RowGeometry geom = row_overlap_and_distances(x);
    const GwlpReport gwlp = gwlp_b1_b2(counts);
    const auto [b1_nb_num, b2_nb_num] = gwlp_nb_minima(x.n, x.p, x.k);
    const double n2 = static_cast<double>(x.n) * x.n;
    const double b1_nb = static_cast<double>(b1_nb_num) / n2;
    const double b2_nb = static_cast<double>(b2_nb_num) / n2;

    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = x.n;
    j["p"] = x.p;
    j["k"] = x.k;
    j["v1"] = v1(counts);
    j["v2"] = v2(counts);
    j["phi_bcd"] = phi_bcd(counts, w);
    j["weights"] = {{"w1", w.w1}, {"w2", w.w2}};
    j["b1"] = gwlp.b1;
    j["b2"] = gwlp.b2;
    j["b1_numerator"] = gwlp.b1_numerator;
    j["b2_numerator"] = gwlp.b2_numerator;
    j["b1_ref"] = gwlp.b1_ref;
    j["b2_ref"] = gwlp.b2_ref;
    j["b1_eff"] = finite_or_flag(gwlp.b1_eff);
    j["b2_eff"] = finite_or_flag(gwlp.b2_eff);
    // efficiencies against the discrete nearly balanced minima at this (n,p,k)
    j["b1_min_nb"] = b1_nb;
    j["b2_min_nb"] = b2_nb;
    j["b1_eff_nb"] = gwlp.b1_numerator == 0
                         ? finite_or_flag(std::numeric_limits<double>::infinity())
                         : finite_or_flag(static_cast<double>(b1_nb_num) / gwlp.b1_numerator);
    j["b2_eff_nb"] = gwlp.b2_numerator == 0
                         ? finite_or_flag(std::numeric_limits<double>::infinity())
                         : finite_or_flag(static_cast<double>(b2_nb_num) / gwlp.b2_numerator);
    j["ue_s2"] = ue_s2_from_counts(counts);
    if (x.n >= 2) {
        j["morris_mitchell"] = finite_or_flag(morris_mitchell(geom, mm_exponent));
        j["morris_mitchell_t"] = mm_exponent;
        const auto mm = maximin_score(geom);
        const auto mx = minimax_score(geom);
        j["maximin"] = {{"min_distance", mm.first}, {"count_at_min", mm.second}};
        j["minimax"] = {{"max_overlap", mx.first},
                        {"count_at_max", mx.second},
                        {"rule", "lexicographic (max overlap, count); one concretization"}};
    }
    if (x.p >= 2) {
        const auto thresholds = m_stage_thresholds(x.n, x.p, x.k, counts);
        j["m_stage_threshold_worst_case"] = thresholds.first;
        j["m_stage_threshold_on_the_fly"] = thresholds.second;
    }
    return j;
}

nlohmann::json spectral_report(const Design& x, const std::vector<double>& alpha_list, double rho,
                               const std::vector<int>& q_list, int proj_subsets,
                               std::uint64_t seed) {
    const Counts counts = compute_counts(x);
    const InfoMatrix info = centered_info(counts);
    const auto [tr_c, tr_c2] = trace_identities(counts);
    const auto pdet = log_pdet(info);
    const auto frob = frobenius_bounds(counts);

    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tr_c"] = tr_c;
    j["tr_c2"] = tr_c2;
    j["eigenvalues"] = info.eigenvalues;
    j["log_pdet"] = pdet.value;
    j["log_pdet_rank_deficient"] = pdet.rank_deficient;
    j["log_pdet_near_zero_count"] = pdet.n_below_tol;
    j["frobenius_lower"] = frob.lower;
    j["frobenius_upper"] = frob.upper;
    j["reference_delta"] = reference_delta(x.n, x.p, x.k);
    nlohmann::json bd = nlohmann::json::array();
    for (double alpha : alpha_list) {
        const auto gap = bayes_d_gap_bound(counts, alpha, rho);
        bd.push_back({{"alpha", alpha},
                      {"f_alpha", bayes_d(info, alpha)},
                      {"gap", gap.g_alpha},
                      {"gap_bound", gap.bound},
                      {"gap_bound_applicable", gap.applicable}});
    }
    j["bayes_d"] = bd;
    j["gap_bound_rho"] = rho;
    nlohmann::json proj = nlohmann::json::array();
    for (int q : q_list) {
        if (q < 2 || q > x.p) continue;
        const auto pl =
            projected_logdet(x, q, proj_subsets, derive_seed(seed, static_cast<std::uint64_t>(q)));
        nlohmann::json entry;
        entry["q"] = q;
        entry["mean_logdet"] = pl.mean;
        entry["n_finite"] = pl.n_finite;
        entry["n_degenerate"] = pl.n_degenerate;
        proj.push_back(entry);
    }
    j["projected_logdet"] = proj;
    return j;
}

nlohmann::json balance_report(const Design& x) {
    const Counts counts = compute_counts(x);
    const BalanceParams params = structural_params(x.n, x.p, x.k);
    const NbCertificate cert = check_nearly_balanced(counts);
    const ExistenceReport exist = existence_conditions(params);

    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["nb1"] = cert.nb1;
    j["nb2"] = cert.nb2;
    j["params"] = {{"f", params.f}, {"s", params.s}, {"kappa", params.kappa}, {"omega", params.omega}};
    j["regime"] = params.type1 ? "Type I" : "Type II";
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : exist.checks)
        conds.push_back({{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}});
    j["conditions"] = conds;
    j["conditions_note"] = "necessary, not sufficient";
    j["all_necessary_pass"] = exist.all_necessary_pass;
    nlohmann::json viol1 = nlohmann::json::array();
    for (auto [factor, r] : cert.nb1_violations) viol1.push_back({{"factor", factor}, {"r", r}});
    j["nb1_violations"] = viol1;
    nlohmann::json viol2 = nlohmann::json::array();
    for (auto [a, b, lam] : cert.nb2_violations)
        viol2.push_back({{"i", a}, {"j", b}, {"lambda", lam}});
    j["nb2_violations"] = viol2;
    const auto bibd = is_bibd(x);
    if (bibd) {
        j["is_bibd"] = true;
        j["bibd"] = {{"p", bibd->p}, {"b", bibd->b}, {"r", bibd->r}, {"k", bibd->k},
                     {"lambda", bibd->lambda}};
    } else {
        j["is_bibd"] = false;
    }
    if (cert.nb1 && cert.nb2) {
        const auto excess = concurrence_excess_graph(x, params);
        auto degrees_of = [](const SimpleGraph& g) {
            nlohmann::json edges = nlohmann::json::array();
            for (auto [i, j2] : g.edges) edges.push_back({i, j2});
            return nlohmann::json{{"num_vertices", g.num_vertices},
                                  {"edges", edges},
                                  {"degrees", g.degrees()}};
        };
        if (excess.type1) {
            j["excess_graph"] = degrees_of(excess.graph);
        } else {
            j["excess_low_block"] = degrees_of(excess.low_block);
            j["excess_high_block"] = degrees_of(excess.high_block);
        }
        j["forced_degrees"] = forced_degrees(params);
    }
    return j;
}

nlohmann::json design_sidecar(const Design& x, std::uint64_t seed, const std::string& provenance) {
    return nlohmann::json{{"schema_version", kSchemaVersion},
                          {"n", x.n},
                          {"p", x.p},
                          {"k", x.k},
                          {"seed", seed},
                          {"provenance", provenance}};
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for digest");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

nlohmann::json run_manifest(const ManifestInput& m) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["command"] = m.command;
    j["args"] = m.args;
    j["seed"] = m.seed;
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& f : m.input_files) inputs.push_back({{"path", f}, {"digest", file_digest(f)}});
    j["inputs"] = inputs;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& f : m.output_files)
        outputs.push_back({{"path", f}, {"digest", file_digest(f)}});
    j["outputs"] = outputs;
    j["wall_clock_ms"] = m.wall_clock_ms;
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace tcard
