// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace hypokit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

namespace linalg {

using Blocks = std::vector<std::vector<Eigen::Index>>;

/// Index sets of the connected components of the sparsity graph of A (edge
/// i-j when |A_ij| or |A_ji| exceeds rel_tol * max|A|). A is permutation
/// similar to the block-diagonal matrix of these components.
Blocks connected_blocks(const Matrix& a, double rel_tol = 1e-13);

Matrix submatrix(const Matrix& a, const std::vector<Eigen::Index>& idx);

/// All eigenvalues of a general square matrix, computed block by block.
ComplexVector eigenvalues(const Matrix& a);
/// Same with a caller-supplied partition; couplings between blocks are
/// treated as zero.
ComplexVector eigenvalues(const Matrix& a, const Blocks& blocks);

/// Eigenvalues of the symmetric part (A + A^T)/2, ascending.
Vector symmetric_eigenvalues(const Matrix& a);
Vector symmetric_eigenvalues(const Matrix& a, const Blocks& blocks);

/// Largest and smallest singular values, block by block.
double max_singular_value(const Matrix& a);
double min_singular_value(const Matrix& a);
double min_singular_value(const Matrix& a, const Blocks& blocks);

/// Upper Cholesky factor R with G = R^T R. Throws ill_conditioned_basis when
/// G is not numerically positive definite.
Matrix cholesky_upper(const Matrix& g);

/// X with R X = B (R upper triangular).
Matrix solve_upper(const Matrix& r, const Matrix& b);
/// X with R^T X = B.
Matrix solve_upper_transpose(const Matrix& r, const Matrix& b);

/// R^{-T} A R^{-1}.
Matrix congruence_inverse(const Matrix& r, const Matrix& a);

/// Solution of A x = b by partial-pivot LU; numerical_failure when A is
/// singular to working precision.
Vector solve(const Matrix& a, const Vector& b);

Matrix expm(const Matrix& a);

/// Gauss quadrature for the standard normal weight: nodes x_i and weights
/// w_i (summing to 1) exact for polynomials of degree < 2n.
void gauss_hermite(std::size_t n, Vector& nodes, Vector& weights);

}  // namespace linalg
}  // namespace hypokit
