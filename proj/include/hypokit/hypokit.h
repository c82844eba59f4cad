/* SPDX-License-Identifier: Apache-2.0 */
/*
 * hypokit C interface.
 *
 * Objects are opaque handles released with the matching *_destroy call.
 * Every function returns an hk_status; on failure a description is available
 * from hk_last_error() on the same thread until the next failing call.
 */
#ifndef HYPOKIT_H
#define HYPOKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(HYPOKIT_BUILDING_LIBRARY)
#define HK_API __attribute__((visibility("default")))
#else
#define HK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hk_status {
  HK_OK = 0,
  HK_INVALID_ARGUMENT = 1,
  HK_INSUFFICIENT_DATA = 2,
  HK_UNSUPPORTED_DOMAIN = 3,
  HK_ILL_CONDITIONED_BASIS = 4,
  HK_NUMERICAL_FAILURE = 5,
  HK_DEFECTIVE_CASE = 6,
  HK_INVALID_EPSILON = 7,
  HK_DEGENERATE_WITNESS = 8,
  HK_IO_ERROR = 9,
  HK_INTERNAL_ERROR = 10
} hk_status;

HK_API const char* hk_version(void);
HK_API const char* hk_status_string(hk_status status);
HK_API const char* hk_last_error(void);

/* ---- tables ------------------------------------------------------------ */

/* Row-major numeric table with named columns. */
typedef struct hk_table hk_table;

HK_API size_t hk_table_rows(const hk_table* t);
HK_API size_t hk_table_cols(const hk_table* t);
HK_API const char* hk_table_column_name(const hk_table* t, size_t col);
HK_API const double* hk_table_data(const hk_table* t);
HK_API void hk_table_destroy(hk_table* t);

/* ---- model ------------------------------------------------------------- */

typedef struct hk_potential hk_potential;

typedef struct hk_ensemble {
  double beta;
  double mass;
  double gamma;
} hk_ensemble;

/* name: flat, quadratic, double_well, cosine, separable; params: JSON object. */
HK_API hk_status hk_potential_create(const char* name, const char* params_json,
                                     hk_potential** out);
/* Minimum-image periodization of a full-space potential on (L T)^d. */
HK_API hk_status hk_potential_periodize(const hk_potential* pot, double length,
                                        hk_potential** out);
HK_API void hk_potential_destroy(hk_potential* pot);
HK_API hk_status hk_potential_info(const hk_potential* pot, int* is_torus, size_t* dim,
                                   double* length);
HK_API hk_status hk_potential_eval(const hk_potential* pot, const double* q, size_t dim,
                                   double* value);
HK_API hk_status hk_potential_grad(const hk_potential* pot, const double* q, size_t dim,
                                   double* grad);
/* Row-major dim x dim Hessian. */
HK_API hk_status hk_potential_hess(const hk_potential* pot, const double* q, size_t dim,
                                   double* hess);
HK_API hk_status hk_hamiltonian(const hk_potential* pot, const hk_ensemble* ens, const double* q,
                                const double* p, size_t dim, double* energy);

/* Torus potentials use a periodic grid; full-space ones the box [lo, hi]^d. */
HK_API hk_status hk_condition_constants(const hk_potential* pot, const hk_ensemble* ens,
                                        double c2, size_t points_per_dim, double box_lo,
                                        double box_hi, double* c1, double* c3, int* feasible);

/* ---- sampling ---------------------------------------------------------- */

/* Standard normal draws first .. first + n - 1 of stream (seed, stream). */
HK_API hk_status hk_rng_normals(uint64_t seed, uint64_t stream, uint64_t first, size_t n,
                                double* out);

/* scheme: langevin, overdamped, hamiltonian. Observable names: q, p, q2, p2,
 * cos, sin, V, H, flux. The table has a time column followed by one column
 * per observable. final_q / final_p may be NULL. */
HK_API hk_status hk_simulate(const hk_potential* pot, const hk_ensemble* ens, const char* scheme,
                             const double* q0, const double* p0, size_t dim, size_t n_steps,
                             size_t stride, double dt, const char* const* observables,
                             size_t n_observables, uint64_t seed, uint64_t stream,
                             hk_table** out, double* final_q, double* final_p);

/* ---- estimators -------------------------------------------------------- */

typedef enum hk_variance_method { HK_ACF_IPS = 0, HK_BATCH_MEANS = 1 } hk_variance_method;

typedef struct hk_variance_report {
  double mean;
  double sigma2;
  double ess;
  hk_variance_method method;
  size_t window_or_batches;
  size_t n_samples;
  int constant_series;
} hk_variance_report;

HK_API hk_status hk_ergodic_average(const double* x, size_t n, double* mean);
HK_API hk_status hk_variance_acf(const double* x, size_t n, double spacing,
                                 hk_variance_report* out);
HK_API hk_status hk_variance_batch_means(const double* x, size_t n, double spacing,
                                         size_t n_batches, hk_variance_report* out);
HK_API hk_status hk_sigma2_stderr(const double* x, size_t n, double spacing, size_t n_segments,
                                  double* stderr_out);

/* ---- spectral ---------------------------------------------------------- */

typedef struct hk_assembly hk_assembly;

/* One-dimensional torus potentials only. */
HK_API hk_status hk_assembly_create(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                                    size_t Np, size_t n_quad, hk_assembly** out);
HK_API void hk_assembly_destroy(hk_assembly* a);
HK_API hk_status hk_assembly_size(const hk_assembly* a, size_t* n);

/* Eigenvalues of -L on mean-zero functions go to *eigs (columns re, im, sorted
 * by real part) when eigs is not NULL. */
HK_API hk_status hk_spectral_gap(const hk_assembly* a, int adjoint, double* gap,
                                 size_t* eig_count, hk_table** eigs);
/* sigma2 of a named observable (see hk_simulate) from the Poisson equation. */
HK_API hk_status hk_solve_poisson(const hk_assembly* a, const char* observable, double* sigma2);

HK_API hk_status hk_poincare_constant(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                                      size_t n_quad, double* R_nu);
/* norms and bounds have n_times entries. */
HK_API hk_status hk_semigroup_decay(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                                    size_t n_quad, const double* times, size_t n_times,
                                    double* norms, double* bounds, double* R_nu,
                                    double* max_ratio, int* holds);
HK_API hk_status hk_overdamped_poisson(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                                       size_t n_quad, const char* observable, double* sigma2);

/* ---- hypocoercivity ---------------------------------------------------- */

HK_API hk_status hk_ode_eigs(double gamma, double lambda_plus[2], double lambda_minus[2],
                             double* gap);
/* P is row-major 2x2. */
HK_API hk_status hk_ode_optimal_P(double gamma, double P[4], double* lambda, double* min_eig,
                                  int* cert);
HK_API hk_status hk_ode_perturbative_P(double gamma, double epsilon, double P[4],
                                       double* min_eig);
/* Columns t, X1, X2. */
HK_API hk_status hk_ode_trajectory(double gamma, const double x0[2], double T, double dt,
                                   hk_table** out);
HK_API hk_status hk_ode_envelope_decay(const hk_table* trajectory, double* rate);

typedef struct hk_dms_result {
  double epsilon;
  double lambda_est;
  double r_norm;
  double lham_r_norm;
  int r_norm_ok;
  int lham_r_norm_ok;
} hk_dms_result;

HK_API hk_status hk_dms_dissipation(const hk_assembly* a, double epsilon, hk_dms_result* out);
HK_API hk_status hk_dms_tune(const hk_assembly* a, double tol, hk_dms_result* out);

typedef enum hk_schur_case {
  HK_SCHUR_CONVEX = 0,
  HK_SCHUR_HESSIAN_LOWER_BOUND = 1,
  HK_SCHUR_GENERAL = 2
} hk_schur_case;

HK_API hk_status hk_resolvent_norm(const hk_assembly* a, double* norm);
/* K is used by the Hessian case, c_prime by the general case. */
HK_API hk_status hk_schur_bound(const hk_ensemble* ens, double R_nu, hk_schur_case kind, double K,
                                double c_prime, double* bound, int* unpinned);
HK_API hk_status hk_verify_schur_bound(const hk_assembly* a, const hk_potential* pot,
                                       const hk_ensemble* ens, hk_schur_case kind, double K,
                                       double c_prime, double R_nu, double slack,
                                       double* numeric, double* bound, int* holds);
HK_API hk_status hk_resolvent_witnesses(const hk_potential* pot, const hk_ensemble* ens,
                                        const hk_assembly* a, double* overdamped,
                                        double* underdamped);

typedef struct hk_scan_fit {
  double slope_left;
  double slope_right;
  double lambda_bar;
  size_t n_left;
  size_t n_right;
  int complete;
} hk_scan_fit;

/* Columns gamma, gap, lower_model, ok. */
HK_API hk_status hk_gamma_scan(const hk_potential* pot, const hk_ensemble* ens,
                               const double* gammas, size_t n_gammas, size_t Kq, size_t Np,
                               size_t n_quad, hk_table** rows, hk_scan_fit* fit);

#ifdef __cplusplus
}
#endif

#endif /* HYPOKIT_H */
