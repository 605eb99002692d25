#include "tcard/design.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tcard/rng.hpp"

namespace tcard {

bool Design::active(int row, int factor) const {
    const auto& s = rows[static_cast<std::size_t>(row)];
    return std::binary_search(s.begin(), s.end(), factor);
}

std::vector<std::uint8_t> Design::dense() const {
    std::vector<std::uint8_t> m(static_cast<std::size_t>(n) * p, 0);
    for (int i = 0; i < n; ++i)
        for (int j : rows[static_cast<std::size_t>(i)])
            m[static_cast<std::size_t>(i) * p + j] = 1;
    return m;
}

Design make_design(int n, int p, int k, std::vector<Support> rows) {
    if (n < 1) throw ValidationError("run count n must be positive, got " + std::to_string(n));
    if (p < 1) throw ValidationError("factor count p must be positive, got " + std::to_string(p));
    if (k < 1 || k > p)
        throw ValidationError("cardinality k must satisfy 1 <= k <= p, got k=" + std::to_string(k) +
                              " with p=" + std::to_string(p));
    if (static_cast<int>(rows.size()) != n)
        throw ValidationError("expected " + std::to_string(n) + " rows, got " +
                              std::to_string(rows.size()));
    for (int i = 0; i < n; ++i) {
        auto& s = rows[static_cast<std::size_t>(i)];
        if (static_cast<int>(s.size()) != k)
            throw ValidationError("row " + std::to_string(i) + ": support size " +
                                  std::to_string(s.size()) + " != k=" + std::to_string(k));
        std::sort(s.begin(), s.end());
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (s[t] < 0 || s[t] >= p)
                throw ValidationError("row " + std::to_string(i) + ": factor index " +
                                      std::to_string(s[t]) + " out of range [0," +
                                      std::to_string(p) + ")");
            if (t > 0 && s[t] == s[t - 1])
                throw ValidationError("row " + std::to_string(i) + ": duplicated factor index " +
                                      std::to_string(s[t]));
        }
    }
    return Design{n, p, k, std::move(rows)};
}

Design random_tcard(int n, int p, int k, std::uint64_t seed) {
    if (n < 1 || p < 1 || k < 1 || k > p)
        throw ValidationError("random_tcard: invalid parameters n=" + std::to_string(n) +
                              " p=" + std::to_string(p) + " k=" + std::to_string(k));
    Rng rng(seed);
    std::vector<Support> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows.push_back(rng.k_subset(p, k));
    return Design{n, p, k, std::move(rows)};
}

Counts compute_counts(const Design& x) {
    Counts c;
    c.n = x.n;
    c.p = x.p;
    c.k = x.k;
    c.r.assign(static_cast<std::size_t>(x.p), 0);
    c.lambda.assign(static_cast<std::size_t>(x.p) * x.p, 0);
    for (const auto& s : x.rows) {
        for (std::size_t a = 0; a < s.size(); ++a) {
            ++c.r[static_cast<std::size_t>(s[a])];
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                ++c.lam(s[a], s[b]);
                ++c.lam(s[b], s[a]);
            }
        }
    }
    for (int j = 0; j < x.p; ++j)
        c.sum_r_sq += static_cast<long long>(c.r[static_cast<std::size_t>(j)]) *
                      c.r[static_cast<std::size_t>(j)];
    for (int i = 0; i < x.p; ++i)
        for (int j = i + 1; j < x.p; ++j)
            c.sum_lambda_sq += static_cast<long long>(c.lam(i, j)) * c.lam(i, j);
    return c;
}

int Counts::max_lambda() const {
    int m = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) m = std::max(m, lam(i, j));
    return m;
}

SwapDelta evaluate_swap(const Counts& counts, const Support& row_support, int row, int a, int b) {
    if (!std::binary_search(row_support.begin(), row_support.end(), a))
        throw ValidationError("evaluate_swap: factor " + std::to_string(a) +
                              " is not active in row " + std::to_string(row));
    if (std::binary_search(row_support.begin(), row_support.end(), b))
        throw ValidationError("evaluate_swap: factor " + std::to_string(b) +
                              " is already active in row " + std::to_string(row));
    SwapDelta d;
    d.row = row;
    d.out_factor = a;
    d.in_factor = b;
    const long long ra = counts.r[static_cast<std::size_t>(a)];
    const long long rb = counts.r[static_cast<std::size_t>(b)];
    d.d_sum_r_sq = 2 * (rb - ra + 1);
    d.touched_pairs.reserve(2 * (row_support.size() - 1));
    for (int j : row_support) {
        if (j == a) continue;
        const long long laj = counts.lam(a, j);
        const long long lbj = counts.lam(b, j);
        d.d_sum_lambda_sq += 2 * (lbj - laj + 1);
        d.touched_pairs.emplace_back(std::min(a, j), std::max(a, j));
        d.touched_pairs.emplace_back(std::min(b, j), std::max(b, j));
    }
    return d;
}

void apply_swap(Design& x, Counts& counts, const SwapDelta& delta) {
    auto& s = x.rows[static_cast<std::size_t>(delta.row)];
    if (!std::binary_search(s.begin(), s.end(), delta.out_factor) ||
        std::binary_search(s.begin(), s.end(), delta.in_factor))
        throw ValidationError("apply_swap: stale delta for row " + std::to_string(delta.row));

    // Recompute the expected statistic changes against the current state; a
    // mismatch means the delta was evaluated against a different state.
    const long long ra = counts.r[static_cast<std::size_t>(delta.out_factor)];
    const long long rb = counts.r[static_cast<std::size_t>(delta.in_factor)];
    long long d_lam = 0;
    for (int j : s) {
        if (j == delta.out_factor) continue;
        d_lam += 2 * (static_cast<long long>(counts.lam(delta.in_factor, j)) -
                      counts.lam(delta.out_factor, j) + 1);
    }
    if (delta.d_sum_r_sq != 2 * (rb - ra + 1) || delta.d_sum_lambda_sq != d_lam)
        throw ValidationError("apply_swap: stale delta for row " + std::to_string(delta.row));

    for (int j : s) {
        if (j == delta.out_factor) continue;
        --counts.lam(delta.out_factor, j);
        --counts.lam(j, delta.out_factor);
        ++counts.lam(delta.in_factor, j);
        ++counts.lam(j, delta.in_factor);
    }
    --counts.r[static_cast<std::size_t>(delta.out_factor)];
    ++counts.r[static_cast<std::size_t>(delta.in_factor)];
    counts.sum_r_sq += delta.d_sum_r_sq;
    counts.sum_lambda_sq += delta.d_sum_lambda_sq;

    s.erase(std::lower_bound(s.begin(), s.end(), delta.out_factor));
    s.insert(std::lower_bound(s.begin(), s.end(), delta.in_factor), delta.in_factor);
}

RowGeometry row_overlap_and_distances(const Design& x) {
    RowGeometry g;
    g.n = x.n;
    g.overlap.assign(static_cast<std::size_t>(x.n) * x.n, 0);
    g.distance.assign(static_cast<std::size_t>(x.n) * x.n, 0);
    for (int i = 0; i < x.n; ++i) {
        g.overlap[static_cast<std::size_t>(i) * x.n + i] = x.k;
        for (int j = i + 1; j < x.n; ++j) {
            const auto& si = x.rows[static_cast<std::size_t>(i)];
            const auto& sj = x.rows[static_cast<std::size_t>(j)];
            int ov = 0;
            std::size_t a = 0, b = 0;
            while (a < si.size() && b < sj.size()) {
                if (si[a] == sj[b]) {
                    ++ov;
                    ++a;
                    ++b;
                } else if (si[a] < sj[b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            const int d = 2 * (x.k - ov);
            g.overlap[static_cast<std::size_t>(i) * x.n + j] = ov;
            g.overlap[static_cast<std::size_t>(j) * x.n + i] = ov;
            g.distance[static_cast<std::size_t>(i) * x.n + j] = d;
            g.distance[static_cast<std::size_t>(j) * x.n + i] = d;
        }
    }
    return g;
}

void save_design_csv(const Design& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const auto m = x.dense();
    for (int i = 0; i < x.n; ++i) {
        for (int j = 0; j < x.p; ++j) {
            if (j) out << ',';
            out << static_cast<int>(m[static_cast<std::size_t>(i) * x.p + j]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

Design load_design_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Support> rows;
    int p = -1;
    int k = -1;
    std::string line;
    int row_index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Support s;
        int col = 0;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            // tolerate surrounding whitespace
            const auto first = cell.find_first_not_of(" \t\r");
            const auto last = cell.find_last_not_of(" \t\r");
            if (first == std::string::npos)
                throw ValidationError("row " + std::to_string(row_index) + ": empty cell");
            cell = cell.substr(first, last - first + 1);
            if (cell == "1")
                s.push_back(col);
            else if (cell != "0")
                throw ValidationError("row " + std::to_string(row_index) + ": entry '" + cell +
                                      "' is not 0/1");
            ++col;
        }
        if (p < 0)
            p = col;
        else if (col != p)
            throw ValidationError("row " + std::to_string(row_index) + ": has " +
                                  std::to_string(col) + " columns, expected " + std::to_string(p));
        if (k < 0)
            k = static_cast<int>(s.size());
        else if (static_cast<int>(s.size()) != k)
            throw ValidationError("row " + std::to_string(row_index) + ": row sum " +
                                  std::to_string(s.size()) + " != k=" + std::to_string(k));
        rows.push_back(std::move(s));
        ++row_index;
    }
    if (rows.empty()) throw ValidationError("design file is empty: " + path);
    if (k == 0) throw ValidationError("row 0: row sum 0, every run must activate k >= 1 factors");
    const int n = static_cast<int>(rows.size());
    return make_design(n, p, k, std::move(rows));
}

}  // namespace tcard
