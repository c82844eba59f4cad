// SPDX-License-Identifier: Apache-2.0
#include "hypokit/hypokit.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypokit/error.hpp"
#include "hypokit/estimators.hpp"
#include "hypokit/hypo.hpp"
#include "hypokit/model.hpp"
#include "hypokit/rng.hpp"
#include "hypokit/sde.hpp"
#include "hypokit/spectral.hpp"

struct hk_table {
  std::vector<std::string> names;
  std::vector<double> data;
  std::size_t rows = 0;
};

struct hk_potential {
  hypokit::PotentialSpec spec;
};

struct hk_assembly {
  hypokit::EnsembleParams params;
  hypokit::GeneratorAssembly asm_;
  hypokit::PotentialSpec spec;
};

namespace {

using namespace hypokit;

thread_local std::string g_last_error;

hk_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return HK_INVALID_ARGUMENT;
    case ErrorCode::insufficient_data: return HK_INSUFFICIENT_DATA;
    case ErrorCode::unsupported_domain: return HK_UNSUPPORTED_DOMAIN;
    case ErrorCode::ill_conditioned_basis: return HK_ILL_CONDITIONED_BASIS;
    case ErrorCode::numerical_failure: return HK_NUMERICAL_FAILURE;
    case ErrorCode::defective_case: return HK_DEFECTIVE_CASE;
    case ErrorCode::invalid_epsilon: return HK_INVALID_EPSILON;
    case ErrorCode::degenerate_witness: return HK_DEGENERATE_WITNESS;
    case ErrorCode::io_error: return HK_IO_ERROR;
  }
  return HK_INTERNAL_ERROR;
}

template <class F>
hk_status guarded(F&& f) {
  try {
    f();
    return HK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("invalid parameters: ") + e.what();
    return HK_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HK_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HK_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return HK_INTERNAL_ERROR;
  }
}

template <class... P>
void need(P*... ptrs) {
  if (((ptrs == nullptr) || ...)) fail(ErrorCode::invalid_argument, "null pointer argument");
}

EnsembleParams ensemble(const hk_ensemble* e) {
  need(e);
  return {e->beta, e->mass, e->gamma};
}

hk_table* make_table(std::vector<std::string> names) {
  auto t = std::make_unique<hk_table>();
  t->names = std::move(names);
  return t.release();
}

bool q_only(std::string_view name) {
  return name == "q" || name == "q2" || name == "cos" || name == "sin" || name == "V";
}

Vector project_named(const BasisSet& basis, const PotentialSpec& spec,
                     const EnsembleParams& params, const char* name) {
  need(name);
  const Observable obs = make_observable(name, spec, params);
  if (q_only(name))
    return project_observable_q(basis, [&](double q) {
      PhaseState s{{q}, {0.0}};
      return obs.fn(s);
    });
  return project_observable(basis, [&](double q, double p) {
    PhaseState s{{q}, {p}};
    return obs.fn(s);
  });
}

void fill_report(const VarianceReport& r, hk_variance_report* out) {
  out->mean = r.mean;
  out->sigma2 = r.sigma2;
  out->ess = r.ess;
  out->method = r.method == VarianceMethod::acf_ips ? HK_ACF_IPS : HK_BATCH_MEANS;
  out->window_or_batches = r.window_or_batches;
  out->n_samples = r.n_samples;
  out->constant_series = r.constant_series ? 1 : 0;
}

SchurCase schur_case(hk_schur_case kind, double K, double c_prime) {
  SchurCase c;
  switch (kind) {
    case HK_SCHUR_CONVEX: c.kind = SchurCase::Kind::convex; break;
    case HK_SCHUR_HESSIAN_LOWER_BOUND: c.kind = SchurCase::Kind::hessian_lower_bound; break;
    case HK_SCHUR_GENERAL: c.kind = SchurCase::Kind::general; break;
    default: fail(ErrorCode::invalid_argument, "unknown bound case");
  }
  c.K = K;
  c.C_prime = c_prime;
  return c;
}

void fill_dms(const DmsResult& r, hk_dms_result* out) {
  out->epsilon = r.epsilon;
  out->lambda_est = r.lambda_est;
  out->r_norm = r.r_norm;
  out->lham_r_norm = r.lham_r_norm;
  out->r_norm_ok = r.r_norm_ok ? 1 : 0;
  out->lham_r_norm_ok = r.lham_r_norm_ok ? 1 : 0;
}

}  // namespace

extern "C" {

const char* hk_version(void) { return "0.1.0"; }

const char* hk_status_string(hk_status status) {
  switch (status) {
    case HK_OK: return "ok";
    case HK_INVALID_ARGUMENT: return "invalid-argument";
    case HK_INSUFFICIENT_DATA: return "insufficient-data";
    case HK_UNSUPPORTED_DOMAIN: return "unsupported-domain";
    case HK_ILL_CONDITIONED_BASIS: return "ill-conditioned-basis";
    case HK_NUMERICAL_FAILURE: return "numerical-failure";
    case HK_DEFECTIVE_CASE: return "defective-case";
    case HK_INVALID_EPSILON: return "invalid-epsilon";
    case HK_DEGENERATE_WITNESS: return "degenerate-witness";
    case HK_IO_ERROR: return "io-error";
    case HK_INTERNAL_ERROR: return "internal-error";
  }
  return "unknown";
}

const char* hk_last_error(void) { return g_last_error.c_str(); }

size_t hk_table_rows(const hk_table* t) { return t ? t->rows : 0; }
size_t hk_table_cols(const hk_table* t) { return t ? t->names.size() : 0; }
const char* hk_table_column_name(const hk_table* t, size_t col) {
  return (t && col < t->names.size()) ? t->names[col].c_str() : nullptr;
}
const double* hk_table_data(const hk_table* t) { return t ? t->data.data() : nullptr; }
void hk_table_destroy(hk_table* t) { delete t; }

hk_status hk_potential_create(const char* name, const char* params_json, hk_potential** out) {
  return guarded([&] {
    need(name, out);
    const auto params = params_json && *params_json ? nlohmann::json::parse(params_json)
                                                    : nlohmann::json::object();
    auto p = std::make_unique<hk_potential>();
    p->spec = builtin_potential(name, params);
    *out = p.release();
  });
}

hk_status hk_potential_periodize(const hk_potential* pot, double length, hk_potential** out) {
  return guarded([&] {
    need(pot, out);
    auto p = std::make_unique<hk_potential>();
    p->spec = periodize(pot->spec, length);
    *out = p.release();
  });
}

void hk_potential_destroy(hk_potential* pot) { delete pot; }

hk_status hk_potential_info(const hk_potential* pot, int* is_torus, size_t* dim, double* length) {
  return guarded([&] {
    need(pot);
    if (is_torus) *is_torus = pot->spec.domain.is_torus() ? 1 : 0;
    if (dim) *dim = pot->spec.dim();
    if (length) *length = pot->spec.domain.length;
  });
}

hk_status hk_potential_eval(const hk_potential* pot, const double* q, size_t dim, double* value) {
  return guarded([&] {
    need(pot, q, value);
    if (dim != pot->spec.dim()) fail(ErrorCode::invalid_argument, "dimension mismatch");
    *value = pot->spec.value({q, dim});
  });
}

hk_status hk_potential_grad(const hk_potential* pot, const double* q, size_t dim, double* grad) {
  return guarded([&] {
    need(pot, q, grad);
    if (dim != pot->spec.dim()) fail(ErrorCode::invalid_argument, "dimension mismatch");
    pot->spec.gradient({q, dim}, {grad, dim});
  });
}

hk_status hk_potential_hess(const hk_potential* pot, const double* q, size_t dim, double* hess) {
  return guarded([&] {
    need(pot, q, hess);
    if (dim != pot->spec.dim()) fail(ErrorCode::invalid_argument, "dimension mismatch");
    pot->spec.hess({q, dim}, {hess, dim * dim});
  });
}

hk_status hk_hamiltonian(const hk_potential* pot, const hk_ensemble* ens, const double* q,
                         const double* p, size_t dim, double* energy) {
  return guarded([&] {
    need(pot, q, p, energy);
    PhaseState s{{q, q + dim}, {p, p + dim}};
    *energy = eval_hamiltonian(pot->spec, ensemble(ens), s);
  });
}

hk_status hk_condition_constants(const hk_potential* pot, const hk_ensemble* ens, double c2,
                                 size_t points_per_dim, double box_lo, double box_hi, double* c1,
                                 double* c3, int* feasible) {
  return guarded([&] {
    need(pot, c1, c3, feasible);
    const auto& d = pot->spec.domain;
    const QuadratureGrid grid = d.is_torus()
                                    ? QuadratureGrid::torus(d.length, d.dim, points_per_dim)
                                    : QuadratureGrid::box(box_lo, box_hi, d.dim, points_per_dim);
    const auto cc = check_condition_constants(pot->spec, ensemble(ens), grid, c2);
    *c1 = cc.c1;
    *c3 = cc.c3;
    *feasible = cc.feasible ? 1 : 0;
  });
}

hk_status hk_rng_normals(uint64_t seed, uint64_t stream, uint64_t first, size_t n, double* out) {
  return guarded([&] {
    need(out);
    RngStream rng(seed, stream);
    rng.seek(first);
    rng.fill_normal({out, n});
  });
}

hk_status hk_simulate(const hk_potential* pot, const hk_ensemble* ens, const char* scheme,
                      const double* q0, const double* p0, size_t dim, size_t n_steps,
                      size_t stride, double dt, const char* const* observables,
                      size_t n_observables, uint64_t seed, uint64_t stream, hk_table** out,
                      double* final_q, double* final_p) {
  return guarded([&] {
    need(pot, scheme, q0, p0, out);
    if (n_observables > 0) need(observables);
    const EnsembleParams params = ensemble(ens);
    std::vector<Observable> obs;
    std::vector<std::string> names{"time"};
    for (size_t i = 0; i < n_observables; ++i) {
      need(observables[i]);
      obs.push_back(make_observable(observables[i], pot->spec, params));
      names.emplace_back(observables[i]);
    }
    PhaseState init{{q0, q0 + dim}, {p0, p0 + dim}};
    RngStream rng(seed, stream);
    TrajectoryRecord rec = simulate(init, n_steps, stride, dt, parse_scheme(scheme), obs,
                                    pot->spec, params, rng);
    std::unique_ptr<hk_table> t(make_table(std::move(names)));
    t->rows = rec.rows();
    t->data.reserve(rec.rows() * (n_observables + 1));
    for (size_t r = 0; r < rec.rows(); ++r) {
      t->data.push_back(rec.times[r]);
      for (size_t j = 0; j < n_observables; ++j) t->data.push_back(rec.at(r, j));
    }
    if (final_q) std::copy(rec.final_state.q.begin(), rec.final_state.q.end(), final_q);
    if (final_p) std::copy(rec.final_state.p.begin(), rec.final_state.p.end(), final_p);
    *out = t.release();
  });
}

hk_status hk_ergodic_average(const double* x, size_t n, double* mean) {
  return guarded([&] {
    need(mean);
    if (n > 0) need(x);
    *mean = ergodic_average({x, n});
  });
}

hk_status hk_variance_acf(const double* x, size_t n, double spacing, hk_variance_report* out) {
  return guarded([&] {
    need(out);
    if (n > 0) need(x);
    fill_report(asymptotic_variance_acf({x, n}, spacing), out);
  });
}

hk_status hk_variance_batch_means(const double* x, size_t n, double spacing, size_t n_batches,
                                  hk_variance_report* out) {
  return guarded([&] {
    need(out);
    if (n > 0) need(x);
    fill_report(batch_means_variance({x, n}, spacing, n_batches), out);
  });
}

hk_status hk_sigma2_stderr(const double* x, size_t n, double spacing, size_t n_segments,
                           double* stderr_out) {
  return guarded([&] {
    need(stderr_out);
    if (n > 0) need(x);
    *stderr_out = sigma2_standard_error({x, n}, spacing, n_segments);
  });
}

hk_status hk_assembly_create(const hk_potential* pot, const hk_ensemble* ens, size_t Kq, size_t Np,
                             size_t n_quad, hk_assembly** out) {
  return guarded([&] {
    need(pot, out);
    auto a = std::make_unique<hk_assembly>();
    a->params = ensemble(ens);
    a->spec = pot->spec;
    const BasisSet b = build_basis(pot->spec, a->params, Kq, Np, n_quad);
    a->asm_ = assemble_generator(b, pot->spec, a->params);
    *out = a.release();
  });
}

void hk_assembly_destroy(hk_assembly* a) { delete a; }

hk_status hk_assembly_size(const hk_assembly* a, size_t* n) {
  return guarded([&] {
    need(a, n);
    *n = a->asm_.size();
  });
}

hk_status hk_spectral_gap(const hk_assembly* a, int adjoint, double* gap, size_t* eig_count,
                          hk_table** eigs) {
  return guarded([&] {
    need(a, gap);
    const GapResult r = spectral_gap(a->asm_, adjoint != 0);
    *gap = r.gap;
    if (eig_count) *eig_count = r.eig_count_checked;
    if (eigs) {
      std::unique_ptr<hk_table> t(make_table({"re", "im"}));
      t->rows = static_cast<size_t>(r.eigenvalues.size());
      for (const auto& z : r.eigenvalues) {
        t->data.push_back(z.real());
        t->data.push_back(z.imag());
      }
      *eigs = t.release();
    }
  });
}

hk_status hk_solve_poisson(const hk_assembly* a, const char* observable, double* sigma2) {
  return guarded([&] {
    need(a, sigma2);
    const Vector c = project_named(a->asm_.basis, a->spec, a->params, observable);
    *sigma2 = solve_poisson(a->asm_, c).sigma2;
  });
}

hk_status hk_poincare_constant(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                               size_t n_quad, double* R_nu) {
  return guarded([&] {
    need(pot, R_nu);
    *R_nu = poincare_constant(pot->spec, ensemble(ens), Kq, n_quad);
  });
}

hk_status hk_semigroup_decay(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                             size_t n_quad, const double* times, size_t n_times, double* norms,
                             double* bounds, double* R_nu, double* max_ratio, int* holds) {
  return guarded([&] {
    need(pot, R_nu, max_ratio, holds);
    if (n_times > 0) need(times);
    const EnsembleParams params = ensemble(ens);
    if (n_quad == 0) n_quad = std::max<size_t>(256, 16 * Kq);
    const double r = poincare_constant(pot->spec, params, Kq, n_quad);
    const BasisSet b = build_basis(pot->spec, params, Kq, 1, n_quad);
    const OverdampedMatrices o = assemble_overdamped(b, pot->spec, params);
    const DecayCheck d =
        semigroup_decay_check(o.L_ovd, o.gram_q, r, params.beta, {times, times + n_times});
    for (size_t i = 0; i < n_times; ++i) {
      if (norms) norms[i] = d.norms[i];
      if (bounds) bounds[i] = d.bounds[i];
    }
    *R_nu = r;
    *max_ratio = d.max_ratio;
    *holds = d.holds ? 1 : 0;
  });
}

hk_status hk_overdamped_poisson(const hk_potential* pot, const hk_ensemble* ens, size_t Kq,
                                size_t n_quad, const char* observable, double* sigma2) {
  return guarded([&] {
    need(pot, observable, sigma2);
    if (!q_only(observable))
      fail(ErrorCode::invalid_argument, "overdamped observables must depend on q only");
    const EnsembleParams params = ensemble(ens);
    if (n_quad == 0) n_quad = std::max<size_t>(256, 16 * Kq);
    const BasisSet b = build_basis(pot->spec, params, Kq, 1, n_quad);
    const OverdampedMatrices o = assemble_overdamped(b, pot->spec, params);
    const Vector c = project_named(b, pot->spec, params, observable);
    *sigma2 = solve_poisson_overdamped(o, c).sigma2;
  });
}

hk_status hk_ode_eigs(double gamma, double lambda_plus[2], double lambda_minus[2], double* gap) {
  return guarded([&] {
    need(lambda_plus, lambda_minus, gap);
    const OdeEigs e = ode_eigs(gamma);
    lambda_plus[0] = e.lambda_plus.real();
    lambda_plus[1] = e.lambda_plus.imag();
    lambda_minus[0] = e.lambda_minus.real();
    lambda_minus[1] = e.lambda_minus.imag();
    *gap = e.gap;
  });
}

hk_status hk_ode_optimal_P(double gamma, double P[4], double* lambda, double* min_eig, int* cert) {
  return guarded([&] {
    need(P, lambda, min_eig, cert);
    const OptimalP o = ode_optimal_P(gamma);
    for (int i = 0; i < 4; ++i) P[i] = o.P(i / 2, i % 2);
    *lambda = o.lambda;
    *min_eig = o.min_eig;
    *cert = o.cert ? 1 : 0;
  });
}

hk_status hk_ode_perturbative_P(double gamma, double epsilon, double P[4], double* min_eig) {
  return guarded([&] {
    need(P, min_eig);
    const PerturbativeP o = ode_perturbative_P(gamma, epsilon);
    for (int i = 0; i < 4; ++i) P[i] = o.P(i / 2, i % 2);
    *min_eig = o.min_eig_of_dissipation;
  });
}

hk_status hk_ode_trajectory(double gamma, const double x0[2], double T, double dt,
                            hk_table** out) {
  return guarded([&] {
    need(x0, out);
    const auto s = ode_trajectory(gamma, {x0[0], x0[1]}, T, dt);
    std::unique_ptr<hk_table> t(make_table({"t", "X1", "X2"}));
    t->rows = s.size();
    t->data.reserve(3 * s.size());
    for (const auto& r : s) {
      t->data.push_back(r.t);
      t->data.push_back(r.x1);
      t->data.push_back(r.x2);
    }
    *out = t.release();
  });
}

hk_status hk_ode_envelope_decay(const hk_table* trajectory, double* rate) {
  return guarded([&] {
    need(trajectory, rate);
    if (trajectory->names.size() != 3)
      fail(ErrorCode::invalid_argument, "expected a (t, X1, X2) table");
    std::vector<OdeSample> s(trajectory->rows);
    for (size_t i = 0; i < s.size(); ++i)
      s[i] = {trajectory->data[3 * i], trajectory->data[3 * i + 1], trajectory->data[3 * i + 2]};
    *rate = fit_envelope_decay(s);
  });
}

hk_status hk_dms_dissipation(const hk_assembly* a, double epsilon, hk_dms_result* out) {
  return guarded([&] {
    need(a, out);
    fill_dms(dms_dissipation(a->asm_, epsilon), out);
  });
}

hk_status hk_dms_tune(const hk_assembly* a, double tol, hk_dms_result* out) {
  return guarded([&] {
    need(a, out);
    fill_dms(dms_tune_epsilon(a->asm_, tol), out);
  });
}

hk_status hk_resolvent_norm(const hk_assembly* a, double* norm) {
  return guarded([&] {
    need(a, norm);
    *norm = resolvent_norm(a->asm_);
  });
}

hk_status hk_schur_bound(const hk_ensemble* ens, double R_nu, hk_schur_case kind, double K,
                         double c_prime, double* bound, int* unpinned) {
  return guarded([&] {
    need(bound);
    const SchurBound b = schur_bound(ensemble(ens), R_nu, schur_case(kind, K, c_prime));
    *bound = b.bound;
    if (unpinned) *unpinned = b.unpinned ? 1 : 0;
  });
}

hk_status hk_verify_schur_bound(const hk_assembly* a, const hk_potential* pot,
                                const hk_ensemble* ens, hk_schur_case kind, double K,
                                double c_prime, double R_nu, double slack, double* numeric,
                                double* bound, int* holds) {
  return guarded([&] {
    need(a, pot, numeric, bound, holds);
    const SchurCheck c = verify_schur_bound(a->asm_, pot->spec, ensemble(ens),
                                            schur_case(kind, K, c_prime), R_nu, slack);
    *numeric = c.numeric;
    *bound = c.bound;
    *holds = c.holds ? 1 : 0;
  });
}

hk_status hk_resolvent_witnesses(const hk_potential* pot, const hk_ensemble* ens,
                                 const hk_assembly* a, double* overdamped, double* underdamped) {
  return guarded([&] {
    need(pot, a, overdamped, underdamped);
    const Witnesses w = resolvent_lower_bound(pot->spec, ensemble(ens), a->asm_);
    *overdamped = w.overdamped_witness;
    *underdamped = w.underdamped_witness;
  });
}

hk_status hk_gamma_scan(const hk_potential* pot, const hk_ensemble* ens, const double* gammas,
                        size_t n_gammas, size_t Kq, size_t Np, size_t n_quad, hk_table** rows,
                        hk_scan_fit* fit) {
  return guarded([&] {
    need(pot, gammas, rows, fit);
    const ScalingTable t = gamma_scan(pot->spec, ensemble(ens), {gammas, gammas + n_gammas}, Kq,
                                      Np, n_quad);
    std::unique_ptr<hk_table> out(make_table({"gamma", "gap", "lower_model", "ok"}));
    out->rows = t.rows.size();
    for (const auto& r : t.rows) {
      out->data.push_back(r.gamma);
      out->data.push_back(r.ok ? r.gap : NAN);
      out->data.push_back(r.lower_model);
      out->data.push_back(r.ok ? 1.0 : 0.0);
    }
    fit->slope_left = t.slope_left;
    fit->slope_right = t.slope_right;
    fit->lambda_bar = t.lambda_bar;
    fit->n_left = t.n_left;
    fit->n_right = t.n_right;
    fit->complete = t.complete ? 1 : 0;
    *rows = out.release();
  });
}

}  // extern "C"
