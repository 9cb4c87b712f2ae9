#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ymh/functionals.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// State and tangent containers
// ---------------------------------------------------------------------------

struct HiggsState {
  Connection A;
  HiggsField theta;
  double t = 0.0;
};

struct PairTangent {
  std::vector<MatrixField> dA;      // 2n components
  std::vector<MatrixField> dtheta;  // n components
};

inline PairTangent zero_tangent(const Connection& A, const HiggsField& theta) {
  PairTangent tg;
  for (const auto& c : A.comp) tg.dA.push_back(zeros_like(c));
  for (const auto& c : theta.comp) tg.dtheta.push_back(zeros_like(c));
  return tg;
}

inline void tangent_axpy(PairTangent& y, double a, const PairTangent& x) {
  for (std::size_t d = 0; d < y.dA.size(); ++d) axpy(y.dA[d], a, x.dA[d]);
  for (std::size_t k = 0; k < y.dtheta.size(); ++k)
    axpy(y.dtheta[k], a, x.dtheta[k]);
}

inline HiggsState apply_tangent(const HiggsState& s, const PairTangent& tg,
                                double c) {
  HiggsState out = s;
  for (std::size_t d = 0; d < tg.dA.size(); ++d) axpy(out.A.comp[d], c, tg.dA[d]);
  for (std::size_t k = 0; k < tg.dtheta.size(); ++k)
    axpy(out.theta.comp[k], c, tg.dtheta[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Flow vector field. With Theta = i Lambda(F + [theta,theta*]) - lambda Id
// and S = i Lambda [theta,theta*]:
//   dA/dt       = -d_A^* F_A - (del_A - delbar_A) S
//   dtheta_k/dt = [theta_k, Theta]
// where the S-term reduces to real covariant derivatives,
//   ((del_A - delbar_A) S)_{2k} = -i nabla_{2k+1} S,
//   ((del_A - delbar_A) S)_{2k+1} = +i nabla_{2k} S.
// Both signs are pinned by descent of the YMH energy (verified against the
// finite-difference first variation in the tests) and match the metric heat
// flow parametrization exactly.
// ---------------------------------------------------------------------------

inline PairTangent flow_direction(const Connection& A, const HiggsField& theta) {
  const auto& g = *A.geom;
  PairTangent tg = zero_tangent(A, theta);

  auto cur = curvature(A);
  const RealTwoForm& F = cur.F;
  const double lambda = [&] {
    MatrixField t = lambda_contract(F);
    return integrate(trace(t)).real() / (static_cast<double>(A.r) * g.volume());
  }();

  // S and Theta (pointwise)
  MatrixField S = lambda_contract(theta_bracket(theta));
  MatrixField Theta = lambda_contract(F);
  axpy(Theta, 1.0, S);
  {
    MatrixField I = identity_field(A.geom, A.r);
    axpy(Theta, -lambda, I);
  }

  // -d_A^* F: (d_A^* F)_d = -sum_e nabla_e F_{ed}
  std::vector<MatrixField> Fspec;
  Fspec.reserve(F.comp.size());
  for (const auto& c : F.comp) Fspec.push_back(spectrum(c));
  for (int d = 0; d < g.real_dim(); ++d) {
    for (int e = 0; e < g.real_dim(); ++e) {
      if (e == d) continue;
      const int lo = std::min(d, e), hi = std::max(d, e);
      const double sgn = (e < d) ? 1.0 : -1.0;  // F_{ed} = sgn * F.at(lo,hi)
      MatrixField t = derivative_from_spectrum(Fspec[F.pair_index(lo, hi)], e);
      bracket_acc(t, A.comp[e], F.at(lo, hi));
      axpy(tg.dA[d], sgn, t);  // -(-sum_e ...) accumulated with sign folded in
    }
  }
  // fold: we accumulated sum_e sgn * nabla_e F.at(lo,hi) = sum_e nabla_e F_{ed}
  // and -d^*F = +sum_e nabla_e F_{ed}; nothing further to negate.

  // -(del_A - delbar_A) S
  MatrixField Sspec = spectrum(S);
  for (int k = 0; k < g.n; ++k) {
    MatrixField gx = derivative_from_spectrum(Sspec, 2 * k);
    bracket_acc(gx, A.comp[2 * k], S);
    MatrixField gy = derivative_from_spectrum(Sspec, 2 * k + 1);
    bracket_acc(gy, A.comp[2 * k + 1], S);
    const cplx I(0.0, 1.0);
    // -( -i nabla_{2k+1} S ) = +i nabla_{2k+1} S on dx_{2k}
    for (std::size_t q = 0; q < gy.v.size(); ++q)
      tg.dA[2 * k].v[q] += I * gy.v[q];
    // -( +i nabla_{2k} S ) = -i nabla_{2k} S on dx_{2k+1}
    for (std::size_t q = 0; q < gx.v.size(); ++q)
      tg.dA[2 * k + 1].v[q] -= I * gx.v[q];
  }

  // dtheta_k/dt = [theta_k, Theta]
  for (int k = 0; k < g.n; ++k)
    tg.dtheta[k] = bracket(theta.comp[k], Theta);

  for (auto& c : tg.dA) project_band(c);
  for (auto& c : tg.dtheta) project_band(c);
  return tg;
}

/// ymh_gradient: the descent direction of the flow together with the exact
/// first variation of the energy along any tangent, used by the
/// finite-difference contract tests.
inline double ymh_first_variation(const Connection& A, const HiggsField& theta,
                                  const PairTangent& tg) {
  const auto& g = *A.geom;
  auto cur = curvature(A);
  RealTwoForm G = std::move(cur.F);
  {
    RealTwoForm tb = to_real(theta_bracket(theta));
    for (std::size_t c = 0; c < G.comp.size(); ++c)
      axpy(G.comp[c], 1.0, tb.comp[c]);
  }
  // delta G = d_A alpha + [phi, theta*] + [theta, phi*]
  RealTwoForm dG(A.geom, A.r);
  for (int d = 0; d < g.real_dim(); ++d)
    for (int e = d + 1; e < g.real_dim(); ++e) {
      MatrixField t = nabla_dir(A, tg.dA[e], d);
      MatrixField u = nabla_dir(A, tg.dA[d], e);
      axpy(t, -1.0, u);
      dG.at(d, e) = std::move(t);
    }
  {
    FormOneOne db(A.geom, A.r);
    std::vector<MatrixField> thadj, phadj;
    for (int k = 0; k < g.n; ++k) {
      thadj.push_back(adjoint(theta.comp[k]));
      phadj.push_back(adjoint(tg.dtheta[k]));
    }
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        db.comp[j][k] = bracket(tg.dtheta[j], thadj[k]);
        bracket_acc(db.comp[j][k], theta.comp[j], phadj[k]);
      }
    RealTwoForm dbr = to_real(db);
    for (std::size_t c = 0; c < dG.comp.size(); ++c)
      axpy(dG.comp[c], 1.0, dbr.comp[c]);
  }
  double var = 0.0;
  for (std::size_t c = 0; c < dG.comp.size(); ++c)
    var += 2.0 * pair_l2(dG.comp[c], G.comp[c]).real();

  if (g.n == 2) {
    FormTwoZero Psi = del(A, theta);
    // delta Psi = del_A phi + [alpha^{1,0}, theta] (graded)
    MatrixField dPsi = holo_derivative(A, tg.dtheta[1], 0);
    {
      MatrixField t = holo_derivative(A, tg.dtheta[0], 1);
      axpy(dPsi, -1.0, t);
    }
    auto alpha10 = [&](int k) {
      MatrixField a(A.geom, A.r);
      const cplx mi(0.0, -0.5);
      for (std::size_t q = 0; q < a.v.size(); ++q)
        a.v[q] = 0.5 * tg.dA[2 * k].v[q] + mi * tg.dA[2 * k + 1].v[q];
      return a;
    };
    bracket_acc(dPsi, alpha10(0), theta.comp[1]);
    bracket_acc(dPsi, alpha10(1), theta.comp[0], -1.0);
    var += 16.0 * pair_l2(dPsi, Psi.comp[0]).real();
  }
  return var;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsRecord {
  double t = 0.0;
  double ymh = 0.0;
  double theta_sup_residual = 0.0;  // sup |Theta|
  double theta_l2_residual = 0.0;   // ||Theta||_L2
  double dbar_drift = 0.0;          // ||dbar_A theta||_L2
  double wedge_drift = 0.0;         // ||theta ^ theta||_L2
  double theta_l2 = 0.0;
  double nabla_theta_l2 = 0.0;
  std::optional<double> lambda_est;
  double dt = 0.0;
  bool accepted = true;
};

struct StateDiag {
  double ymh = 0.0;
  double theta_sup_res = 0.0;
  double theta_l2_res = 0.0;
  double dbar = 0.0;
  double wedge = 0.0;
  double theta_l2 = 0.0;
  double nabla_theta_l2 = 0.0;
  double lambda = 0.0;
  std::vector<double> energy;  // density, for parabolic diagnostics
};

inline StateDiag diagnose(const Connection& A, const HiggsField& theta) {
  StateDiag d;
  auto cur = curvature(A);
  const RealTwoForm& F = cur.F;
  d.lambda = [&] {
    MatrixField t = lambda_contract(F);
    return integrate(trace(t)).real() /
           (static_cast<double>(A.r) * A.geom->volume());
  }();
  FormOneOne tb = theta_bracket(theta);

  RealTwoForm G = F;
  {
    RealTwoForm tbr = to_real(tb);
    for (std::size_t c = 0; c < G.comp.size(); ++c)
      axpy(G.comp[c], 1.0, tbr.comp[c]);
  }
  d.energy = pointwise_sq(G);
  if (A.geom->n == 2) {
    auto ps = pointwise_sq(del(A, theta));
    for (std::size_t p = 0; p < d.energy.size(); ++p)
      d.energy[p] += 2.0 * ps[p];
  }
  d.ymh = integrate_real(d.energy, *A.geom);

  MatrixField Theta = lambda_contract(G);
  {
    MatrixField I = identity_field(A.geom, A.r);
    axpy(Theta, -d.lambda, I);
  }
  auto f2 = frobenius_sq(Theta);
  double mx = 0.0, acc = 0.0;
  for (double x : f2) {
    mx = std::max(mx, x);
    acc += x;
  }
  d.theta_sup_res = std::sqrt(mx);
  d.theta_l2_res = std::sqrt(acc * A.geom->cell_weight());
  d.dbar = std::sqrt(l2_sq(delbar(A, theta)));
  d.wedge = std::sqrt(l2_sq(wedge_square(theta)));
  d.theta_l2 = std::sqrt(l2_sq(theta));
  d.nabla_theta_l2 = std::sqrt(nabla_theta_l2_sq(A, theta));
  return d;
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct FlowParams {
  double dt0 = 1e-2;
  double dt_max = 0.0;  // 0: stability cap 2.5/sum_d k_max,d^2 of the band
  double t_max = 50.0;
  double theta_sup_target = 0.0;  // stop when sup|Theta| below; 0 disables
  double descent_rel_tol = 1e-12;
  double descent_abs_tol = -1.0;  // <0: auto, 1e-14 * max(1, ymh(0))
  double drift_budget = 1e-6;    // allowed residual increase per unit time
  double growth = 1.25;
  int max_halvings = 20;
  double higgs_pair_tol = 1e-5;  // initial-data admissibility
  int energy_sample_every = 0;   // store energy density every k accepted steps
};

inline double stability_dt_cap(const TorusGeometry& g) {
  double lam = 0.0;
  for (int d = 0; d < g.real_dim(); ++d) {
    const double km = 2.0 * std::numbers::pi * g.band_limit[d] / g.sides[d];
    lam += km * km;
  }
  return lam > 0.0 ? 2.5 / lam : 1.0;
}

struct StepResult {
  HiggsState state;
  StateDiag diag;
  bool accepted = false;
  std::string reason;
};

inline bool all_finite(const HiggsState& s) {
  for (const auto& c : s.A.comp)
    for (const auto& e : c.v)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  for (const auto& c : s.theta.comp)
    for (const auto& e : c.v)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

/// One classical RK4 step with descent / constraint-drift acceptance.
inline StepResult flow_step(const HiggsState& s, double dt,
                            const StateDiag& cur, const FlowParams& prm) {
  PairTangent k1 = flow_direction(s.A, s.theta);
  HiggsState s2 = apply_tangent(s, k1, 0.5 * dt);
  PairTangent k2 = flow_direction(s2.A, s2.theta);
  HiggsState s3 = apply_tangent(s, k2, 0.5 * dt);
  PairTangent k3 = flow_direction(s3.A, s3.theta);
  HiggsState s4 = apply_tangent(s, k3, dt);
  PairTangent k4 = flow_direction(s4.A, s4.theta);

  tangent_axpy(k1, 2.0, k2);
  tangent_axpy(k1, 2.0, k3);
  tangent_axpy(k1, 1.0, k4);
  HiggsState next = apply_tangent(s, k1, dt / 6.0);
  next.t = s.t + dt;

  StepResult out{std::move(next), {}, false, ""};
  if (!all_finite(out.state)) {
    out.reason = "non-finite field values";
    return out;
  }
  out.diag = diagnose(out.state.A, out.state.theta);
  const double abs_tol =
      prm.descent_abs_tol >= 0.0 ? prm.descent_abs_tol : 1e-14 * std::max(1.0, cur.ymh);
  if (!(out.diag.ymh <= cur.ymh + prm.descent_rel_tol * std::abs(cur.ymh) + abs_tol)) {
    out.reason = "energy increased";
    return out;
  }
  const double drift_allow = prm.drift_budget * dt + 1e-13;
  if (out.diag.dbar - cur.dbar > drift_allow ||
      out.diag.wedge - cur.wedge > drift_allow) {
    out.reason = "constraint drift exceeded budget";
    return out;
  }
  out.accepted = true;
  return out;
}

// ---------------------------------------------------------------------------
// Flow driver
// ---------------------------------------------------------------------------

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<EnergySample> energy_samples;
  HiggsState final_state;
  bool reached_target = false;
  std::string error;  // empty on clean termination
};

inline Trajectory run_flow(
    const Connection& A0, const HiggsField& theta0, const FlowParams& prm,
    const std::function<void(const DiagnosticsRecord&)>& sink = nullptr) {
  Trajectory traj;
  auto pair_rep = is_higgs_pair(A0, theta0, prm.higgs_pair_tol);
  if (!pair_rep.pass) {
    traj.error = "initial data fails the Higgs-pair constraints at tol";
    traj.final_state = HiggsState{A0, theta0, 0.0};
    return traj;
  }

  HiggsState state{A0, theta0, 0.0};
  StateDiag diag = diagnose(state.A, state.theta);
  const double cap = prm.dt_max > 0.0 ? prm.dt_max : stability_dt_cap(*A0.geom);
  double dt = std::min(prm.dt0, cap);

  auto emit = [&](const StateDiag& d, double used_dt) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.ymh = d.ymh;
    rec.theta_sup_residual = d.theta_sup_res;
    rec.theta_l2_residual = d.theta_l2_res;
    rec.dbar_drift = d.dbar;
    rec.wedge_drift = d.wedge;
    rec.theta_l2 = d.theta_l2;
    rec.nabla_theta_l2 = d.nabla_theta_l2;
    rec.dt = used_dt;
    rec.accepted = true;
    traj.records.push_back(rec);
    if (sink) sink(rec);
  };

  emit(diag, 0.0);
  std::size_t accepted_count = 0;
  if (prm.energy_sample_every > 0)
    traj.energy_samples.push_back({state.t, diag.energy});

  while (true) {
    if (prm.theta_sup_target > 0.0 && diag.theta_sup_res < prm.theta_sup_target) {
      traj.reached_target = true;
      break;
    }
    if (state.t >= prm.t_max - 1e-12) break;

    double try_dt = std::min(dt, prm.t_max - state.t);
    StepResult sr{HiggsState{}, {}, false, ""};
    int halvings = 0;
    for (;; ++halvings) {
      sr = flow_step(state, try_dt, diag, prm);
      if (sr.accepted) break;
      if (halvings >= prm.max_halvings) {
        traj.error = "step failure after max halvings: " + sr.reason;
        traj.final_state = std::move(state);
        return traj;
      }
      try_dt *= 0.5;
    }
    state = std::move(sr.state);
    diag = std::move(sr.diag);
    ++accepted_count;
    emit(diag, try_dt);
    if (prm.energy_sample_every > 0 &&
        accepted_count % static_cast<std::size_t>(prm.energy_sample_every) == 0)
      traj.energy_samples.push_back({state.t, diag.energy});
    dt = std::min(std::min(try_dt * prm.growth, cap),
                  prm.dt_max > 0.0 ? prm.dt_max : cap);
  }
  if (prm.energy_sample_every > 0 &&
      (traj.energy_samples.empty() || traj.energy_samples.back().t < state.t))
    traj.energy_samples.push_back({state.t, diag.energy});
  traj.final_state = std::move(state);
  return traj;
}

// ---------------------------------------------------------------------------
// Hermitian metric heat flow at frozen (A0, theta0):
//   dh/dt = -2 h (R(h) - lambda Id),
//   R(h)  = i Lambda(F_{A0} + delbar_{A0}(h^{-1} del_{A0} h)
//                    + [theta0, h^{-1} theta0^* h]).
// ---------------------------------------------------------------------------

struct MetricState {
  MatrixField h;
  Connection A0;
  HiggsField theta0;
  double t = 0.0;
};

struct MetricFlowContext {
  MatrixField ilf0;  // i Lambda F_{A0}, h-independent
  double lambda = 0.0;
};

inline MetricFlowContext make_metric_context(const Connection& A0) {
  MetricFlowContext ctx{lambda_contract(curvature(A0).F), 0.0};
  ctx.lambda = integrate(trace(ctx.ilf0)).real() /
               (static_cast<double>(A0.r) * A0.geom->volume());
  return ctx;
}

/// Theta_h = R(h) - lambda Id (the metric-side Hermitian-Einstein residual).
inline MatrixField metric_residual_field(const MetricState& m,
                                         const MetricFlowContext& ctx) {
  const auto& g = *m.h.geom;
  MatrixField R = ctx.ilf0;
  MatrixField hinv = inverse_field(m.h);
  for (int k = 0; k < g.n; ++k) {
    MatrixField dh = holo_derivative(m.A0, m.h, k);      // D_k h
    MatrixField xi = mul(hinv, dh);                      // h^{-1} D_k h
    MatrixField dxi = antiholo_derivative(m.A0, xi, k);  // Dbar_k xi
    axpy(R, -2.0, dxi);  // i Lambda dbar(xi dz) = -2 sum_k Dbar_k xi_k
    MatrixField th = m.theta0.comp[k];
    MatrixField conj = mul(mul(hinv, adjoint(th)), m.h);  // h^{-1} theta* h
    bracket_acc(R, th, conj, 2.0);
  }
  MatrixField I = identity_field(m.h.geom, m.h.r);
  axpy(R, -ctx.lambda, I);
  return R;
}

/// Pointwise |X|_{H} with H = h^{-1} relative to H0, i.e. the Frobenius norm
/// of h^{1/2} X h^{-1/2}; reduces to |X|_F at h = Id.
inline std::vector<double> h_norm_sq(const MatrixField& X, const MatrixField& h);

struct MetricStepResult {
  MetricState state;
  bool accepted = false;
  std::string reason;
  double sup_residual = 0.0;
};

struct MetricFlowParams {
  double dt0 = 1e-3;
  double dt_max = 0.0;  // 0: stability cap
  double descent_rel_tol = 1e-10;
  int max_halvings = 20;
  double det_clip_lo = 1e-6;
  double det_clip_hi = 1e6;
};

namespace detail {

inline double min_eig_hermitian(const MatrixField& h, std::size_t p);
inline cplx det_at(const MatrixField& h, std::size_t p);

}  // namespace detail

inline MatrixField metric_rhs(const MetricState& m, const MetricFlowContext& ctx) {
  MatrixField Th = metric_residual_field(m, ctx);
  MatrixField rhs(m.h.geom, m.h.r);
  mul_acc(rhs, m.h, Th, -2.0);
  project_band(rhs);
  return rhs;
}

inline MetricStepResult metric_flow_step(const MetricState& m, double dt,
                                         const MetricFlowContext& ctx,
                                         const MetricFlowParams& prm) {
  auto add = [&](const MetricState& s, const MatrixField& k, double c) {
    MetricState out = s;
    axpy(out.h, c, k);
    return out;
  };
  MatrixField k1 = metric_rhs(m, ctx);
  MetricState m2 = add(m, k1, 0.5 * dt);
  MatrixField k2 = metric_rhs(m2, ctx);
  MetricState m3 = add(m, k2, 0.5 * dt);
  MatrixField k3 = metric_rhs(m3, ctx);
  MetricState m4 = add(m, k3, dt);
  MatrixField k4 = metric_rhs(m4, ctx);

  axpy(k1, 2.0, k2);
  axpy(k1, 2.0, k3);
  axpy(k1, 1.0, k4);
  MetricStepResult out{add(m, k1, dt / 6.0), false, "", 0.0};
  out.state.t = m.t + dt;

  // enforce Hermitian part, then check positivity and determinant clips
  MatrixField& h = out.state.h;
  {
    MatrixField hadj = adjoint(h);
    axpy(h, 1.0, hadj);
    scale(h, 0.5);
  }
  for (const auto& e : h.v)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      out.reason = "non-finite metric";
      return out;
    }
  for (std::size_t p = 0; p < h.npts(); ++p) {
    if (detail::min_eig_hermitian(h, p) <= 0.0) {
      out.reason = "metric lost positivity";
      return out;
    }
    const double dh = std::abs(detail::det_at(h, p));
    if (dh < prm.det_clip_lo || dh > prm.det_clip_hi) {
      out.reason = "det h outside clip thresholds";
      return out;
    }
  }
  auto f2 = h_norm_sq(metric_residual_field(out.state, ctx), h);
  double mx = 0.0;
  for (double x : f2) mx = std::max(mx, x);
  out.sup_residual = std::sqrt(mx);
  out.accepted = true;
  return out;
}

struct MetricTrajectory {
  MetricState final_state;
  std::vector<std::pair<double, double>> sup_residuals;  // (t, sup|Theta_h|_H)
  std::string error;
};

inline MetricTrajectory run_metric_flow(const Connection& A0,
                                        const HiggsField& theta0, double t_end,
                                        const MetricFlowParams& prm) {
  MetricTrajectory traj;
  MetricFlowContext ctx = make_metric_context(A0);
  MetricState m{identity_field(A0.geom, A0.r), A0, theta0, 0.0};
  const double cap = prm.dt_max > 0.0 ? prm.dt_max : stability_dt_cap(*A0.geom);
  double dt = std::min(prm.dt0, cap);
  double sup_prev = [&] {
    auto f2 = h_norm_sq(metric_residual_field(m, ctx), m.h);
    double mx = 0.0;
    for (double x : f2) mx = std::max(mx, x);
    return std::sqrt(mx);
  }();
  traj.sup_residuals.push_back({0.0, sup_prev});

  while (m.t < t_end - 1e-12) {
    double try_dt = std::min(dt, t_end - m.t);
    MetricStepResult sr{MetricState{}, false, "", 0.0};
    int halvings = 0;
    for (;; ++halvings) {
      sr = metric_flow_step(m, try_dt, ctx, prm);
      if (sr.accepted &&
          sr.sup_residual <= sup_prev * (1.0 + prm.descent_rel_tol) + 1e-13)
        break;
      if (sr.accepted) sr.reason = "sup residual increased";
      if (halvings >= prm.max_halvings) {
        traj.error = "metric step failure after max halvings: " + sr.reason;
        traj.final_state = std::move(m);
        return traj;
      }
      try_dt *= 0.5;
    }
    m = std::move(sr.state);
    sup_prev = sr.sup_residual;
    traj.sup_residuals.push_back({m.t, sup_prev});
    dt = std::min(try_dt * 1.25, cap);
  }
  traj.final_state = std::move(m);
  return traj;
}

// ---------------------------------------------------------------------------
// Cross-parametrization residual identity
// ---------------------------------------------------------------------------

struct ResidualGap {
  double l2_conn = 0.0, l2_metric = 0.0, l2_gap = 0.0;
  double sup_conn = 0.0, sup_metric = 0.0, sup_gap = 0.0;
};

/// Compare |Theta(A(t),theta(t))|_{H0} with |Theta_h(t)|_{H(t)} for two flows
/// started from the same Higgs pair and run to the same time.
inline ResidualGap cross_check_residuals(const HiggsState& conn_state,
                                         const MetricState& metric_state,
                                         const MetricFlowContext& ctx) {
  if (std::abs(conn_state.t - metric_state.t) > 1e-9)
    throw std::invalid_argument("cross_check_residuals: mismatched flow times");
  ResidualGap gap;
  {
    StateDiag d = diagnose(conn_state.A, conn_state.theta);
    gap.l2_conn = d.theta_l2_res;
    gap.sup_conn = d.theta_sup_res;
  }
  {
    auto f2 = h_norm_sq(metric_residual_field(metric_state, ctx), metric_state.h);
    double mx = 0.0, acc = 0.0;
    for (double x : f2) {
      mx = std::max(mx, x);
      acc += x;
    }
    gap.sup_metric = std::sqrt(mx);
    gap.l2_metric = std::sqrt(acc * metric_state.h.geom->cell_weight());
  }
  gap.l2_gap = std::abs(gap.l2_conn - gap.l2_metric);
  gap.sup_gap = std::abs(gap.sup_conn - gap.sup_metric);
  return gap;
}

}  // namespace ymh

// Implementation of the Eigen-backed pointwise helpers.
#include <Eigen/Eigenvalues>

namespace ymh {

namespace detail {

inline double min_eig_hermitian(const MatrixField& h, std::size_t p) {
  const int r = h.r;
  if (r == 1) return h.at(p, 0, 0).real();
  Eigen::MatrixXcd m(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = h.at(p, i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline cplx det_at(const MatrixField& h, std::size_t p) {
  const int r = h.r;
  Eigen::MatrixXcd m(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = h.at(p, i, j);
  return m.determinant();
}

}  // namespace detail

inline std::vector<double> h_norm_sq(const MatrixField& X, const MatrixField& h) {
  const int r = X.r;
  std::vector<double> out(X.npts(), 0.0);
  Eigen::MatrixXcd hm(r, r), xm(r, r);
  for (std::size_t p = 0; p < X.npts(); ++p) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        hm(i, j) = h.at(p, i, j);
        xm(i, j) = X.at(p, i, j);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::VectorXd sq = ev.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXcd hsqrt = U * sq.asDiagonal() * U.adjoint();
    Eigen::VectorXd isq(r);
    for (int i = 0; i < r; ++i) isq(i) = sq(i) > 0.0 ? 1.0 / sq(i) : 0.0;
    Eigen::MatrixXcd hisqrt = U * isq.asDiagonal() * U.adjoint();
    out[p] = (hsqrt * xm * hisqrt).squaredNorm();
  }
  return out;
}

}  // namespace ymh
