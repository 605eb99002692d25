#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcard/criteria.hpp"
#include "tcard/design.hpp"

namespace tcard {

struct CriterionSpec {
    enum class Kind { PhiBCD, V1, V2, UEs2, MorrisMitchell, Maximin, Minimax };

    Kind kind = Kind::PhiBCD;
    Weights weights;            // PhiBCD only
    double mm_exponent = 15.0;  // Morris–Mitchell only

    bool count_based() const {
        return kind == Kind::PhiBCD || kind == Kind::V1 || kind == Kind::V2 ||
               kind == Kind::UEs2;
    }
    std::string name() const;
};

CriterionSpec parse_criterion(const std::string& name, const Weights& w, double mm_exponent);

struct CeConfig {
    int restarts = 20;
    int max_sweeps = 200;
    std::uint64_t seed = 0;
    CriterionSpec criterion;
    // 0 for count-based criteria (integer-backed deltas make exact zero
    // meaningful); distance criteria use a small relative tolerance.
    double improvement_tol = -1.0;  // negative = pick the default for the criterion
    bool random_start = false;      // default start is greedy-rep-pair + light shake
    int candidate_cap = 0;          // 0 = evaluate all k(p-k) swaps per row
    int threads = 1;
};

struct SearchTrace {
    std::vector<double> restart_objectives;  // final objective per restart
    std::vector<int> restart_sweeps;
    long long accepted_swaps = 0;
    int best_restart = -1;
    double best_objective = 0.0;
};

// Multi-start coordinate exchange: per restart, sweep rows and accept the
// single best strictly improving within-row swap per row until a full sweep
// improves nothing (or max_sweeps). Deterministic for a fixed config.
std::pair<Design, SearchTrace> ce_optimize(int n, int p, int k, const CeConfig& config);

// One sweep over the rows of x in place; returns whether any swap was
// accepted. Exposed for tests and incremental use.
bool ce_sweep(Design& x, Counts& counts, const CriterionSpec& criterion, double improvement_tol);

// Sequential feasible constructions. greedy_rep fills each row with the k
// least-replicated factors; greedy_rep_pair additionally scores candidates by
// the concurrence increment against the factors already chosen in the row.
// Ties are broken by a seeded shuffle.
Design greedy_rep(int n, int p, int k, std::uint64_t seed);
Design greedy_rep_pair(int n, int p, int k, std::uint64_t seed);

// After a search at a supra-threshold weight ratio, checks the even
// replication split max(r) - min(r) <= 1.
bool m_stage_lockin_check(const Counts& counts);

// The objective ce_optimize minimizes for a given criterion, evaluated from
// scratch. For distance criteria the lexicographic scores are embedded in an
// order-faithful scalar (see optimizer.cpp).
double criterion_objective(const Design& x, const Counts& counts, const CriterionSpec& spec);

}  // namespace tcard
