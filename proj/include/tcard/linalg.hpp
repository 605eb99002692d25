#pragma once

#include <vector>

namespace tcard {

// Dense symmetric p x p matrix, row-major.
using SymMatrix = std::vector<double>;

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Destroys nothing (works on a copy). Intended for the small p used here.
std::vector<double> sym_eigenvalues(const SymMatrix& a, int p);

// log det of a positive definite matrix via Cholesky. Returns false when a
// pivot falls at or below tol (matrix singular/indefinite at this tolerance).
bool cholesky_logdet(const SymMatrix& a, int p, double tol, double& logdet_out);

// Least squares min ||y - A b|| for a dense column-major-free simple case:
// A is n x m row-major. Solves the normal equations with partial-pivot
// Gaussian elimination; near-zero pivots zero the corresponding coefficient.
std::vector<double> least_squares(const std::vector<double>& a, int n, int m,
                                  const std::vector<double>& y);

}  // namespace tcard
