// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hypokit/linalg.hpp"
#include "hypokit/model.hpp"

namespace hypokit {

/// Fourier(q) x Hermite(p) tensor basis on a one-dimensional torus.
///
/// Position modes are real: f_0 = 1, f_{2k-1} = sqrt(2) cos(2 pi k q / L),
/// f_{2k} = sqrt(2) sin(2 pi k q / L), k = 1..Kq, so Nq = 2 Kq + 1. Momentum
/// modes are the normalized Hermite functions h_n(p) = He_n(p sqrt(beta/m)) /
/// sqrt(n!), orthonormal under the Gaussian with variance m / beta. The tensor
/// function f_k h_n has index n Nq + k.
///
/// All position integrals use the periodic trapezoid rule with the
/// unnormalized weight exp(-beta (V - V_min)), so gram_q(0, 0) is the
/// partition function Z of that weight.
struct BasisSet {
  std::size_t Kq = 0;
  std::size_t Np = 0;
  std::size_t n_quad = 0;
  double L = 1.0;
  double beta = 1.0;
  double mass = 1.0;

  std::vector<double> quad_points;
  Vector quad_weights;  // (L / n_quad) exp(-beta (V - V_min))
  Vector v_values;      // V at quad points
  Vector dv_values;     // V' at quad points
  double v_min = 0.0;
  Matrix f_values;   // n_quad x Nq, f_k at quad points
  Matrix df_values;  // n_quad x Nq, f_k'
  Matrix gram_q;     // Nq x Nq

  std::size_t nq() const noexcept { return 2 * Kq + 1; }
  std::size_t size() const noexcept { return nq() * Np; }
  double partition_function() const { return gram_q(0, 0); }

  /// Weighted position integral of u(q) f_k(q) for every k.
  Vector moments(const Vector& u_at_quad) const;
};

/// Evaluates the tensor basis function value at (q, p) by direct summation.
double basis_function(const BasisSet& basis, std::size_t index, double q, double p);

/// Hermite functions h_0..h_{n-1} at p.
std::vector<double> hermite_functions(std::size_t n, double p, double beta, double mass);

BasisSet build_basis(const PotentialSpec& spec, const EnsembleParams& params, std::size_t Kq,
                     std::size_t Np, std::size_t n_quad);

/// Galerkin matrices in stiffness form: entry (i, j) is <e_i, L e_j> in the
/// weighted L^2 product, so the matrix acting on coefficients is
/// gram^{-1} (L_ham + gamma L_FD).
///
/// Orthonormal coordinates y = R x with gram = R^T R (R block upper
/// triangular) are cached: K_ham = R^{-T} L_ham R^{-1} and likewise K_FD.
/// Coordinate y_0 is the normalized constant function, so dropping it is
/// the restriction to mean-zero functions.
struct GeneratorAssembly {
  BasisSet basis;
  Matrix L_ham;
  Matrix L_FD;
  Matrix gram;
  double gamma = 1.0;
  Matrix pi0;  // coefficient projector onto Hermite level 0

  Matrix chol_q;  // R_q with gram_q = R_q^T R_q
  Matrix K_ham;
  Matrix K_FD;
  // Decoupled index sets of deflated(), read off the coefficient-space
  // sparsity. The orthonormal matrices carry Cholesky round-off that
  // hides the parity splitting.
  linalg::Blocks deflated_blocks;

  std::size_t size() const noexcept { return basis.size(); }
  Matrix generator() const { return L_ham + gamma * L_FD; }
  /// gram^{-1} L in coefficient space.
  Matrix operator_matrix() const;
  /// The generator in orthonormal coordinates with the constant removed.
  Matrix deflated(double gamma_value) const;
  Matrix deflated() const { return deflated(gamma); }

  Vector to_orthonormal(const Vector& x) const;
  Vector from_orthonormal(const Vector& y) const;
};

GeneratorAssembly assemble_generator(const BasisSet& basis, const PotentialSpec& spec,
                                     const EnsembleParams& params);

struct GapResult {
  double gap = 0.0;
  std::size_t eig_count_checked = 0;
  ComplexVector eigenvalues;  // of -L on mean-zero functions
};

/// Smallest real part of the spectrum of -L restricted to mean-zero
/// functions. With adjoint set, the Fokker-Planck operator
/// -L_ham + gamma L_FD is used instead.
GapResult spectral_gap(const GeneratorAssembly& asm_, bool adjoint = false);
GapResult spectral_gap(const GeneratorAssembly& asm_, double gamma, bool adjoint = false);

/// Galerkin projection (gram solve) of phi(q, p). Momentum integrals use
/// Gauss-Hermite quadrature with Np + 24 nodes.
Vector project_observable(const BasisSet& basis, const std::function<double(double, double)>& phi);
/// Same for phi(q); only the Hermite level 0 block is non-zero.
Vector project_observable_q(const BasisSet& basis, const std::function<double(double)>& phi);

struct PoissonResult {
  Vector Phi;
  double sigma2 = 0.0;
};

/// Solves -L Phi = P phi on mean-zero functions, P phi = phi - E_mu(phi).
/// sigma2 = 2 <Phi, P phi>_{L^2(mu)}.
PoissonResult solve_poisson(const GeneratorAssembly& asm_, const Vector& phi_coeffs);

struct OverdampedMatrices {
  Matrix L_ovd;  // stiffness form, -(1/beta) int f_i' f_j' e^{-beta V}
  Matrix gram_q;
};

OverdampedMatrices assemble_overdamped(const BasisSet& basis, const PotentialSpec& spec,
                                       const EnsembleParams& params);

/// R_nu = beta times the smallest non-zero eigenvalue of -L_ovd relative to
/// gram_q. n_quad = 0 picks max(256, 16 Kq).
double poincare_constant(const PotentialSpec& spec, const EnsembleParams& params, std::size_t Kq,
                         std::size_t n_quad = 0);

struct DecayCheck {
  bool holds = true;
  double max_ratio = 0.0;
  std::vector<double> norms;   // ||exp(t L_ovd)|| on mean-zero functions
  std::vector<double> bounds;  // exp(-R t / beta)
};

DecayCheck semigroup_decay_check(const Matrix& L_ovd, const Matrix& gram_q, double R_nu,
                                 double beta, const std::vector<double>& times);

/// Overdamped Poisson solve: -L_ovd Phi = P phi, sigma2 = 2 <Phi, P phi>_nu.
PoissonResult solve_poisson_overdamped(const OverdampedMatrices& ovd, const Vector& phi_q_coeffs);

}  // namespace hypokit
