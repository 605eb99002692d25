#include "tcard/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace tcard {

std::vector<double> sym_eigenvalues(const SymMatrix& a_in, int p) {
    SymMatrix a = a_in;
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * p + j]; };

    double norm = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) norm += at(i, j) * at(i, j);
    norm = std::sqrt(norm);
    const double stop = (norm > 0.0 ? norm : 1.0) * 1e-15;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off += 2.0 * at(i, j) * at(i, j);
        if (std::sqrt(off) <= stop) break;

        for (int i = 0; i < p - 1; ++i) {
            for (int j = i + 1; j < p; ++j) {
                const double apq = at(i, j);
                if (apq == 0.0) continue;
                const double app = at(i, i);
                const double aqq = at(j, j);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int r = 0; r < p; ++r) {
                    if (r == i || r == j) continue;
                    const double ari = at(r, i);
                    const double arj = at(r, j);
                    at(r, i) = c * ari - s * arj;
                    at(i, r) = at(r, i);
                    at(r, j) = s * ari + c * arj;
                    at(j, r) = at(r, j);
                }
                at(i, i) = app - t * apq;
                at(j, j) = aqq + t * apq;
                at(i, j) = 0.0;
                at(j, i) = 0.0;
            }
        }
    }

    std::vector<double> eig(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

bool cholesky_logdet(const SymMatrix& a_in, int p, double tol, double& logdet_out) {
    SymMatrix l = a_in;
    auto at = [&](int i, int j) -> double& { return l[static_cast<std::size_t>(i) * p + j]; };
    double logdet = 0.0;
    for (int j = 0; j < p; ++j) {
        double d = at(j, j);
        for (int t = 0; t < j; ++t) d -= at(j, t) * at(j, t);
        if (d <= tol) return false;
        const double ljj = std::sqrt(d);
        at(j, j) = ljj;
        logdet += 2.0 * std::log(ljj);
        for (int i = j + 1; i < p; ++i) {
            double v = at(i, j);
            for (int t = 0; t < j; ++t) v -= at(i, t) * at(j, t);
            at(i, j) = v / ljj;
        }
    }
    logdet_out = logdet;
    return true;
}

std::vector<double> least_squares(const std::vector<double>& a, int n, int m,
                                  const std::vector<double>& y) {
    // normal equations G b = c with G = A^T A, c = A^T y
    std::vector<double> g(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> c(static_cast<std::size_t>(m), 0.0);
    for (int t = 0; t < n; ++t) {
        const double* row = &a[static_cast<std::size_t>(t) * m];
        for (int i = 0; i < m; ++i) {
            c[static_cast<std::size_t>(i)] += row[i] * y[static_cast<std::size_t>(t)];
            for (int j = i; j < m; ++j)
                g[static_cast<std::size_t>(i) * m + j] += row[i] * row[j];
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j)
            g[static_cast<std::size_t>(i) * m + j] = g[static_cast<std::size_t>(j) * m + i];

    double scale = 0.0;
    for (int i = 0; i < m; ++i)
        scale = std::max(scale, std::abs(g[static_cast<std::size_t>(i) * m + i]));
    const double tol = (scale > 0.0 ? scale : 1.0) * 1e-12;

    // Gaussian elimination with partial pivoting; rank-deficient columns get
    // coefficient zero.
    std::vector<double> b(static_cast<std::size_t>(m), 0.0);
    std::vector<bool> dropped(static_cast<std::size_t>(m), false);

    for (int col = 0; col < m; ++col) {
        int piv = col;
        double best = std::abs(g[static_cast<std::size_t>(col) * m + col]);
        for (int r = col + 1; r < m; ++r) {
            const double v = std::abs(g[static_cast<std::size_t>(r) * m + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best <= tol) {
            dropped[static_cast<std::size_t>(col)] = true;
            continue;
        }
        if (piv != col) {
            for (int j = 0; j < m; ++j)
                std::swap(g[static_cast<std::size_t>(piv) * m + j],
                          g[static_cast<std::size_t>(col) * m + j]);
            std::swap(c[static_cast<std::size_t>(piv)], c[static_cast<std::size_t>(col)]);
        }
        const double d = g[static_cast<std::size_t>(col) * m + col];
        for (int r = col + 1; r < m; ++r) {
            const double f = g[static_cast<std::size_t>(r) * m + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < m; ++j)
                g[static_cast<std::size_t>(r) * m + j] -= f * g[static_cast<std::size_t>(col) * m + j];
            c[static_cast<std::size_t>(r)] -= f * c[static_cast<std::size_t>(col)];
        }
    }
    for (int col = m - 1; col >= 0; --col) {
        if (dropped[static_cast<std::size_t>(col)]) {
            b[static_cast<std::size_t>(col)] = 0.0;
            continue;
        }
        double v = c[static_cast<std::size_t>(col)];
        for (int j = col + 1; j < m; ++j)
            v -= g[static_cast<std::size_t>(col) * m + j] * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(col)] = v / g[static_cast<std::size_t>(col) * m + col];
    }
    return b;
}

}  // namespace tcard
