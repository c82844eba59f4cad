// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hypokit/model.hpp"
#include "hypokit/spectral.hpp"

namespace hypokit {

// ---------------------------------------------------------------------------
// Two-dimensional toy model dX/dt = L X with -L = A + gamma S,
// A = [[0, 1], [-1, 0]], S = [[0, 0], [0, 1]].

using Matrix2 = Eigen::Matrix2d;

Matrix2 ode_matrix(double gamma);

struct OdeEigs {
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  double gap = 0.0;
  // eigenvalues of -L from a direct 2x2 eigensolve, sorted like the closed form
  std::complex<double> check_plus;
  std::complex<double> check_minus;
};

/// lambda_pm = gamma/2 +- sqrt(gamma^2/4 - 1); gap = min Re lambda.
OdeEigs ode_eigs(double gamma);
double ode_gap(double gamma);

struct OptimalP {
  Matrix2 P;
  double lambda = 0.0;
  double min_eig = 0.0;  // smallest eigenvalue of -(PL + L^T P) - 2 lambda P
  bool cert = false;
};

/// P = Re(sum a X X^H) over eigenvectors X of L^T with a = 1/|X|^2.
/// Throws defective_case within 1e-6 of gamma = 2.
OptimalP ode_optimal_P(double gamma);

struct PerturbativeP {
  Matrix2 P;
  double min_eig_of_dissipation = 0.0;  // of -(PL + L^T P)
};

/// P = Id - epsilon [[0, 1], [1, 0]], 0 <= epsilon < 1.
PerturbativeP ode_perturbative_P(double gamma, double epsilon);

struct OdeSample {
  double t;
  double x1;
  double x2;
};

/// Classical RK4 on [0, T] with ceil(T/dt) equal steps.
std::vector<OdeSample> ode_trajectory(double gamma, std::array<double, 2> x0, double T, double dt);

/// exp(t L) x0.
std::array<double, 2> ode_exact(double gamma, std::array<double, 2> x0, double t);

/// Decay rate from a log-linear fit through the local maxima of |X(t)|.
/// Falls back to all samples with t >= T/2 when there are fewer than three
/// maxima.
double fit_envelope_decay(const std::vector<OdeSample>& samples);

struct PrefactorProbe {
  bool exceeds = false;  // some X(0) on the unit circle has |X(t)| > e^{-lambda t}
  double max_ratio = 0.0;
};

/// Scans X(0) on the unit circle and t in (0, T] for |X(t)| e^{lambda t}.
PrefactorProbe ode_probe_unit_prefactor(double gamma, double T, std::size_t n_angles = 360,
                                        std::size_t n_times = 400);

// ---------------------------------------------------------------------------
// Modified-norm dissipation at Galerkin level.

struct DmsResult {
  double epsilon = 0.0;
  double lambda_est = 0.0;
  double r_norm = 0.0;       // ||2R||
  double lham_r_norm = 0.0;  // ||L_ham R||
  bool r_norm_ok = false;
  bool lham_r_norm_ok = false;
  double min_eig_norm_matrix = 0.0;  // of the scalar-product matrix Id - eps (R + R^T)
};

/// The scalar product behind H[phi] = |phi|^2/2 - eps <R phi, phi> is
///   <<x, y>> = x^T (Id - eps (R + R^T)) y  in orthonormal coordinates,
/// and lambda_est is the smallest eigenvalue of Sym(-(Id - eps(R + R^T)) K)
/// on mean-zero functions, K the generator.
DmsResult dms_dissipation(const GeneratorAssembly& asm_, double epsilon);

/// Golden-section maximization of lambda_est over epsilon in (0, 1).
DmsResult dms_tune_epsilon(const GeneratorAssembly& asm_, double tol = 1e-3);

// ---------------------------------------------------------------------------
// Resolvent bounds.

/// Largest singular value of L^{-1} on mean-zero functions.
double resolvent_norm(const GeneratorAssembly& asm_);

struct SchurCase {
  enum class Kind { convex, hessian_lower_bound, general };
  Kind kind = Kind::convex;
  double K = 0.0;        // Hessian lower bound -K, hessian_lower_bound only
  double C_prime = 0.0;  // caller supplied, general only
};

struct SchurBound {
  double bound = 0.0;
  double C = 0.0;
  double C_prime = 0.0;
  bool unpinned = false;
};

/// 2 beta gamma / R + (8 m / gamma)(3/8 + C + C' / R).
SchurBound schur_bound(const EnsembleParams& params, double R_nu, const SchurCase& c);

struct SchurCheck {
  double numeric = 0.0;
  double bound = 0.0;
  bool holds = false;
  bool unpinned = false;
};

/// Checks that the case applies to V on the quadrature grid, then
/// holds = resolvent_norm <= bound (1 + slack).
SchurCheck verify_schur_bound(const GeneratorAssembly& asm_, const PotentialSpec& spec,
                              const EnsembleParams& params, const SchurCase& c, double R_nu,
                              double slack = 0.05);

struct Witnesses {
  double overdamped_witness = 0.0;
  double underdamped_witness = 0.0;
};

/// |u| / |L u| for u = p V' + gamma (V - c_V) and for u = H - E(H).
Witnesses resolvent_lower_bound(const PotentialSpec& spec, const EnsembleParams& params,
                                const GeneratorAssembly& asm_);

// ---------------------------------------------------------------------------
// Friction scans.

struct ScanRow {
  double gamma = 0.0;
  double gap = 0.0;
  double lower_model = 0.0;  // min(gamma, 1/gamma)
  bool ok = false;
  std::string error;
};

struct ScalingTable {
  std::vector<ScanRow> rows;
  double slope_left = 0.0;   // log-log slope over gamma <= 1/2
  double slope_right = 0.0;  // over gamma >= 2
  double lambda_bar = 0.0;   // min gap / min(gamma, 1/gamma)
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  bool complete = false;
};

/// start, start r, ..., start r^{count-1}.
std::vector<double> geometric_gammas(double start, double ratio, std::size_t count);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Spectral gap at each gamma, rows computed in parallel. Requires at least 7
/// increasing values covering [1/8, 8].
ScalingTable gamma_scan(const PotentialSpec& spec, const EnsembleParams& params_base,
                        const std::vector<double>& gammas, std::size_t Kq, std::size_t Np,
                        std::size_t n_quad, std::size_t max_threads = 0);

}  // namespace hypokit
