// SPDX-License-Identifier: Apache-2.0
// Reference values computed without the library's discretizations.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace hypokit::oracle {

/// Smallest non-zero Rayleigh quotient of int |u'|^2 rho / int u^2 rho on a
/// periodic grid of n points, rho = exp(-beta V), conservative differences.
double fd_poincare(const std::function<double(double)>& V, double L, double beta, std::size_t n);

/// Langevin gap for V = omega^2 q^2 / 2 in one dimension: the smallest
/// -Re mu over eigenvalues mu of the drift matrix [[0, 1/m], [-omega^2, -gamma/m]].
double ou_gap(double omega, double mass, double gamma);

/// Asymptotic variance of phi = q for the same process:
/// 2 e_q^T (-B)^{-1} Sigma e_q with stationary covariance Sigma.
double ou_sigma2_q(double omega, double mass, double beta, double gamma);

/// ||L^{-1}|| on mean-zero functions for omega = m = beta = 1, using Hermite
/// functions in both q and p up to total degree max_degree. L preserves the
/// total degree, so the norm is the largest block norm.
double ou_resolvent_norm(double gamma, std::size_t max_degree);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

/// Plain weighted integral helpers on a periodic grid of n points.
double periodic_integral(const std::function<double(double)>& f, double L, std::size_t n);

}  // namespace hypokit::oracle
