#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tcard/design.hpp"

namespace tcard {

// Structural quadruple for (n,p,k):
//   f = floor(nk/p), s = p - (nk - p f),
//   kappa = floor((k-1) f / (p-1)),
//   omega = p - 1 - ((k-1) f - kappa (p-1)),
// with the Type I regime omega >= k-1 and Type II otherwise.
struct BalanceParams {
    int n = 0;
    int p = 0;
    int k = 0;
    long long f = 0;
    int s = 0;
    long long kappa = 0;
    int omega = 0;
    bool type1 = true;
};

BalanceParams structural_params(int n, int p, int k);  // errors: p < 2

struct NbCertificate {
    bool nb1 = false;
    bool nb2 = false;
    // factors whose replication leaves {f, f+1}
    std::vector<std::pair<int, int>> nb1_violations;  // (factor, r)
    // pairs whose concurrence leaves the per-factor floor/ceil band
    std::vector<std::tuple<int, int, int>> nb2_violations;  // (j, l, lambda)
};

// NB1: every r_j in {f, f+1}. NB2: for each j, every lambda_jl lies in
// {floor(r_j (k-1)/(p-1)), ceil(r_j (k-1)/(p-1))}.
NbCertificate check_nearly_balanced(const Design& x);
NbCertificate check_nearly_balanced(const Counts& counts);

// Forced degree sequence of the concurrence-excess structure. Type I: s
// vertices at p-1-omega and p-s at p-1-omega+(k-1). Type II: the two
// within-class regular blocks, s vertices at s-omega-1 and p-s at k-omega-1.
std::vector<int> forced_degrees(const BalanceParams& params);

// Erdos–Gallai: true iff the sequence is the degree sequence of some simple
// graph. Input order is irrelevant (sorted internally).
bool erdos_gallai(std::vector<int> degrees);

struct ExistenceCheck {
    std::string name;
    bool pass = false;
    long long lhs = 0;
    long long rhs = 0;
};

// Necessary conditions only; general constructions outside the boundary
// regimes are an open problem and handled by search instead.
struct ExistenceReport {
    bool type1 = true;
    std::vector<ExistenceCheck> checks;
    bool all_necessary_pass = true;
};

ExistenceReport existence_conditions(const BalanceParams& params);

struct SimpleGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;  // i < j

    std::vector<int> degrees() const;
};

// Excess structure of a nearly balanced design. Type I: one simple graph with
// edges at the upper concurrence level kappa+1. Type II: the two within-class
// graphs (cross-class concurrence is forced to kappa+1).
struct ExcessGraph {
    bool type1 = true;
    SimpleGraph graph;                    // Type I
    SimpleGraph low_block;                // Type II: r = f class, edges at kappa+1
    SimpleGraph high_block;               // Type II: r = f+1 class, edges at kappa+2
    std::vector<int> low_class;           // factors with r = f
    std::vector<int> high_class;          // factors with r = f+1
};

// Errors on designs that are not nearly balanced.
ExcessGraph concurrence_excess_graph(const Design& x, const BalanceParams& params);

struct BibdParams {
    int p = 0;
    int b = 0;
    int r = 0;
    int k = 0;
    int lambda = 0;
};

// Present iff every factor is replicated equally and every pair co-occurs
// equally (the fully balanced case).
std::optional<BibdParams> is_bibd(const Design& x);

// Havel–Hakimi realization: highest degree first, ties broken by lowest
// vertex index. Deterministic; empty when the sequence is not graphical.
std::optional<SimpleGraph> realize_degrees(const std::vector<int>& degrees);

// k = 2 boundary construction: floor(n / C(p,2)) full copies of all pairs
// plus a nearly regular simple graph on the remaining m runs. Always nearly
// balanced.
Design construct_k2(int n, int p, std::uint64_t seed);

// k = p-1 boundary construction: distribute runs over the singleton
// complements as evenly as possible. Always nearly balanced.
Design construct_k_pm1(int n, int p);

}  // namespace tcard
