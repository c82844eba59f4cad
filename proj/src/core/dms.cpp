// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hypokit/error.hpp"
#include "hypokit/hypo.hpp"

namespace hypokit {

namespace {

// R = (Id + B^T B)^{-1} B^T with B = K_ham Pi_0. Only the Hermite level 0
// rows of R are non-zero.
struct DmsOperator {
  Matrix R;  // full size, orthonormal coordinates
  double r_norm = 0.0;
  double lham_r_norm = 0.0;
};

DmsOperator build_operator(const GeneratorAssembly& a) {
  const auto nq = static_cast<Eigen::Index>(a.basis.nq());
  const auto n = static_cast<Eigen::Index>(a.size());
  const Matrix b0 = a.K_ham.leftCols(nq);
  const Matrix c = b0.transpose() * b0;
  const Matrix top = (Matrix::Identity(nq, nq) + c).llt().solve(b0.transpose());
  DmsOperator op;
  op.R = Matrix::Zero(n, n);
  op.R.topRows(nq) = top;
  op.r_norm = 2.0 * linalg::max_singular_value(top);
  op.lham_r_norm = linalg::max_singular_value(Matrix(b0 * top));
  return op;
}

DmsResult evaluate(const GeneratorAssembly& a, const DmsOperator& op, double epsilon) {
  if (!(std::abs(epsilon) < 1.0)) fail(ErrorCode::invalid_epsilon, "epsilon must satisfy |epsilon| < 1");
  const Eigen::Index n = static_cast<Eigen::Index>(a.size()) - 1;
  const Matrix rd = op.R.bottomRightCorner(n, n);
  const Matrix norm_matrix = Matrix::Identity(n, n) - epsilon * (rd + rd.transpose());
  DmsResult r;
  r.epsilon = epsilon;
  r.r_norm = op.r_norm;
  r.lham_r_norm = op.lham_r_norm;
  r.r_norm_ok = op.r_norm <= 1.0 + 1e-8;
  r.lham_r_norm_ok = op.lham_r_norm <= 1.0 + 1e-8;
  r.min_eig_norm_matrix = linalg::symmetric_eigenvalues(norm_matrix, a.deflated_blocks)(0);
  if (!(r.min_eig_norm_matrix > 0.0))
    fail(ErrorCode::invalid_epsilon, "modified scalar product is not positive definite");
  const Matrix diss = -(norm_matrix * a.deflated());
  r.lambda_est = linalg::symmetric_eigenvalues(diss, a.deflated_blocks)(0);
  return r;
}

}  // namespace

DmsResult dms_dissipation(const GeneratorAssembly& asm_, double epsilon) {
  if (!(std::abs(epsilon) < 1.0)) fail(ErrorCode::invalid_epsilon, "epsilon must satisfy |epsilon| < 1");
  return evaluate(asm_, build_operator(asm_), epsilon);
}

DmsResult dms_tune_epsilon(const GeneratorAssembly& asm_, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  const DmsOperator op = build_operator(asm_);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0 - 1e-9;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  DmsResult f1 = evaluate(asm_, op, x1), f2 = evaluate(asm_, op, x2);
  while (hi - lo > tol) {
    if (f1.lambda_est < f2.lambda_est) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = evaluate(asm_, op, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = evaluate(asm_, op, x1);
    }
  }
  return f1.lambda_est >= f2.lambda_est ? f1 : f2;
}

}  // namespace hypokit
