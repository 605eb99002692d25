#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tcard/optimizer.hpp"
#include "tcard/screening.hpp"

namespace tcard {

struct TuningScenario {
    double nu = 1.0;
    double sigma = 1.0;
    double mu = 0.0;
    double weight = 1.0;  // aggregation weight over h; uniform by default
};

struct TuningPlan {
    std::vector<double> w1_grid;            // G >= 2, positive, w2 fixed to 1
    std::vector<int> q_set;
    std::vector<TuningScenario> scenarios;  // the h index
    int mc_reps = 20;
    double epsilon = 1e-8;                  // sd floor for the z-scores
    CeConfig ce;                            // weights overwritten per grid point
    std::uint64_t seed = 0;                 // Monte Carlo master seed
};

struct TuningResult {
    std::vector<double> w1_grid;
    std::vector<int> q_set;
    int n_scenarios = 0;
    // score_table[q][h][g] and z_table[q][h][g]
    std::vector<std::vector<std::vector<double>>> score_table;
    std::vector<std::vector<std::vector<double>>> z_table;
    // mu_q[q][g]: mean z over h
    std::vector<std::vector<double>> mu_q;
    std::map<int, double> w1_star;   // per q
    std::map<int, Design> designs;   // the committed design per q
    std::vector<Design> grid_designs;  // X^(g), one per grid point
};

// Z-scores across a grid with sample sd (G-1 denominator) floored at epsilon.
std::vector<double> zscore_standardize(const std::vector<double>& scores, double epsilon);

// For each grid point build one design by CE with weights (w1, 1) under an
// identical search budget and seeds, score it by mean F1 over the (q,h) plan,
// standardize per (q,h) across the grid, aggregate over h, and pick the
// argmax per q (ties to the smallest w1). All designs are committed before
// any scoring.
TuningResult tune_w1(int n, int p, int k, const TuningPlan& plan);

}  // namespace tcard
