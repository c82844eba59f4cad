// SPDX-License-Identifier: Apache-2.0
#include "hypokit/linalg.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypokit/error.hpp"

namespace hypokit::linalg {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) fail(ErrorCode::invalid_argument, std::string(what) + ": matrix not square");
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace

Blocks connected_blocks(const Matrix& a, double rel_tol) {
  require_square(a, "connected_blocks");
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  const double cut = rel_tol * (n > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && std::abs(a(i, j)) > cut) {
        const Eigen::Index ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

Matrix submatrix(const Matrix& a, const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) out(i, j) = a(idx[i], idx[j]);
  return out;
}

ComplexVector eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  return eigenvalues(a, connected_blocks(a));
}

ComplexVector eigenvalues(const Matrix& a, const Blocks& blocks) {
  require_square(a, "eigenvalues");
  if (!all_finite(a)) fail(ErrorCode::numerical_failure, "eigenvalues: non-finite entries");
  ComplexVector out(a.rows());
  Eigen::Index pos = 0;
  for (const auto& blk : blocks) {
    if (blk.size() == 1) {
      out(pos++) = a(blk[0], blk[0]);
      continue;
    }
    Eigen::EigenSolver<Matrix> es(submatrix(a, blk), false);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::numerical_failure,
           "eigensolver did not converge on a block of size " + std::to_string(blk.size()));
    out.segment(pos, es.eigenvalues().size()) = es.eigenvalues();
    pos += es.eigenvalues().size();
  }
  return out;
}

Vector symmetric_eigenvalues(const Matrix& a) {
  require_square(a, "symmetric_eigenvalues");
  return symmetric_eigenvalues(a, connected_blocks(0.5 * (a + a.transpose())));
}

Vector symmetric_eigenvalues(const Matrix& a, const Blocks& blocks) {
  require_square(a, "symmetric_eigenvalues");
  if (!all_finite(a)) fail(ErrorCode::numerical_failure, "symmetric_eigenvalues: non-finite entries");
  const Matrix s = 0.5 * (a + a.transpose());
  Vector out(s.rows());
  Eigen::Index pos = 0;
  for (const auto& blk : blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(submatrix(s, blk), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      fail(ErrorCode::numerical_failure, "symmetric eigensolver did not converge");
    out.segment(pos, es.eigenvalues().size()) = es.eigenvalues();
    pos += es.eigenvalues().size();
  }
  std::sort(out.data(), out.data() + out.size());
  return out;
}

namespace {

Vector block_singular_values(const Matrix& a, const Blocks& blocks) {
  require_square(a, "singular values");
  if (!all_finite(a)) fail(ErrorCode::numerical_failure, "singular values: non-finite entries");
  Vector out(a.rows());
  Eigen::Index pos = 0;
  for (const auto& blk : blocks) {
    Eigen::BDCSVD<Matrix> svd(submatrix(a, blk));
    out.segment(pos, svd.singularValues().size()) = svd.singularValues();
    pos += svd.singularValues().size();
  }
  return out;
}

}  // namespace

double max_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() != a.cols()) {
    Eigen::BDCSVD<Matrix> svd(a);
    return svd.singularValues()(0);
  }
  return block_singular_values(a, connected_blocks(a)).maxCoeff();
}

double min_singular_value(const Matrix& a) {
  if (a.size() == 0) fail(ErrorCode::invalid_argument, "empty matrix");
  return block_singular_values(a, connected_blocks(a)).minCoeff();
}

double min_singular_value(const Matrix& a, const Blocks& blocks) {
  if (a.size() == 0) fail(ErrorCode::invalid_argument, "empty matrix");
  return block_singular_values(a, blocks).minCoeff();
}

Matrix cholesky_upper(const Matrix& g) {
  require_square(g, "cholesky");
  if (!all_finite(g)) fail(ErrorCode::ill_conditioned_basis, "Gram matrix has non-finite entries");
  Eigen::LLT<Matrix> llt(0.5 * (g + g.transpose()));
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::ill_conditioned_basis, "Gram matrix is not positive definite");
  Matrix r = llt.matrixU();
  const Vector d = r.diagonal().cwiseAbs();
  if (d.minCoeff() <= 1e-7 * d.maxCoeff())
    fail(ErrorCode::ill_conditioned_basis, "Gram matrix is numerically singular");
  return r;
}

Matrix solve_upper(const Matrix& r, const Matrix& b) {
  return r.triangularView<Eigen::Upper>().solve(b);
}

Matrix solve_upper_transpose(const Matrix& r, const Matrix& b) {
  return r.transpose().triangularView<Eigen::Lower>().solve(b);
}

Matrix congruence_inverse(const Matrix& r, const Matrix& a) {
  const Matrix left = solve_upper_transpose(r, a);
  // (left R^{-1}) = (R^{-T} left^T)^T
  return solve_upper_transpose(r, left.transpose()).transpose();
}

Vector solve(const Matrix& a, const Vector& b) {
  require_square(a, "solve");
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) fail(ErrorCode::numerical_failure, "linear system is singular after deflation");
  return lu.solve(b);
}

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  if (!all_finite(a)) fail(ErrorCode::numerical_failure, "expm: non-finite entries");
  Matrix out = a.exp();
  if (!all_finite(out)) fail(ErrorCode::numerical_failure, "matrix exponential overflowed");
  return out;
}

void gauss_hermite(std::size_t n, Vector& nodes, Vector& weights) {
  if (n < 1) fail(ErrorCode::invalid_argument, "Gauss-Hermite needs at least one node");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix j = Matrix::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  nodes = es.eigenvalues();
  weights = es.eigenvectors().row(0).transpose().cwiseAbs2();
}

}  // namespace hypokit::linalg
