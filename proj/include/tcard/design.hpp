#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcard/errors.hpp"

namespace tcard {

using Support = std::vector<int>;  // strictly increasing factor indices

// n x p binary design with every row activating exactly k factors.
// Rows are stored as sorted supports; duplicates are allowed (a design is a
// multiset of supports).
struct Design {
    int n = 0;
    int p = 0;
    int k = 0;
    std::vector<Support> rows;

    bool active(int row, int factor) const;

    // Dense 0/1 view, row-major n*p.
    std::vector<std::uint8_t> dense() const;
};

// Validates and normalizes (sorts) the supports. Rejections name the
// offending row.
Design make_design(int n, int p, int k, std::vector<Support> rows);

// Each row an independent uniform k-subset; reproducible for a fixed seed.
Design random_tcard(int n, int p, int k, std::uint64_t seed);

// Replication / concurrence bookkeeping. All fields are exact integers; the
// rational targets are exposed as numerator/denominator pairs plus a double
// convenience value.
struct Counts {
    int n = 0;
    int p = 0;
    int k = 0;
    std::vector<int> r;           // length p
    std::vector<int> lambda;      // p*p symmetric, zero diagonal
    long long sum_r_sq = 0;       // sum_j r_j^2
    long long sum_lambda_sq = 0;  // sum_{i<j} lambda_ij^2

    int lam(int i, int j) const { return lambda[static_cast<std::size_t>(i) * p + j]; }
    int& lam(int i, int j) { return lambda[static_cast<std::size_t>(i) * p + j]; }

    // rbar = n*k/p
    long long r_bar_num() const { return static_cast<long long>(n) * k; }
    long long r_bar_den() const { return p; }
    double r_bar() const { return static_cast<double>(r_bar_num()) / static_cast<double>(p); }

    // lambda_bar = n*k*(k-1) / (p*(p-1))
    long long lambda_bar_num() const { return static_cast<long long>(n) * k * (k - 1); }
    long long lambda_bar_den() const { return static_cast<long long>(p) * (p - 1); }
    double lambda_bar() const {
        return static_cast<double>(lambda_bar_num()) / static_cast<double>(lambda_bar_den());
    }

    int max_lambda() const;
};

Counts compute_counts(const Design& x);

// One within-row exchange (out_factor -> 0, in_factor -> 1) together with the
// exact integer changes it causes in the sufficient statistics. Applying then
// reverting restores Counts bit-exactly.
struct SwapDelta {
    int row = -1;
    int out_factor = -1;
    int in_factor = -1;
    long long d_sum_r_sq = 0;
    long long d_sum_lambda_sq = 0;
    std::vector<std::pair<int, int>> touched_pairs;  // at most 2(k-1) pairs
};

// Scores the exchange in O(k): only r_a, r_b and the pairs against the other
// in-row factors move.
SwapDelta evaluate_swap(const Counts& counts, const Support& row_support, int row, int a, int b);

// Mutates design + counts consistently. Throws ValidationError on a stale
// delta (state changed since evaluation).
void apply_swap(Design& x, Counts& counts, const SwapDelta& delta);

// Pairwise run geometry: overlap[i][j] = |S_i ∩ S_j| and the Hamming
// distance d[i][j] = 2*(k - overlap[i][j]).
struct RowGeometry {
    int n = 0;
    std::vector<int> overlap;   // n*n, diagonal = k
    std::vector<int> distance;  // n*n, zero diagonal

    int ov(int i, int j) const { return overlap[static_cast<std::size_t>(i) * n + j]; }
    int dist(int i, int j) const { return distance[static_cast<std::size_t>(i) * n + j]; }
};

RowGeometry row_overlap_and_distances(const Design& x);

// --- file formats -----------------------------------------------------------

// Plain 0/1 CSV, one run per line, no header.
void save_design_csv(const Design& x, const std::string& path);

// Loads and validates: rectangular, 0/1 entries, constant row sum. Errors
// name the offending row (0-based).
Design load_design_csv(const std::string& path);

}  // namespace tcard
