#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ymh/functionals.hpp"
#include "ymh/rng.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// Rough Laplacian on End(E)-valued (1,0)-forms
// ---------------------------------------------------------------------------

/// (nabla_A^* nabla_A v)_k = -sum_d nabla_d nabla_d v_k on the flat torus.
/// Expanded as -sum_d (d_d^2 v + d_d[A_d,v] + [A_d, d_d v] + [A_d,[A_d,v]])
/// so the flat part and the divergence of the brackets each cost one
/// transform round trip.
inline HiggsField rough_laplacian_apply(const Connection& A, const HiggsField& v) {
  const auto& g = *v.geom;
  HiggsField out(v.geom, v.r);
  for (int k = 0; k < g.n; ++k) {
    const MatrixField& vk = v.comp[k];
    MatrixField S = spectrum(vk);
    // flat part: + sum_d k_d^2 in spectral space (= -sum d_d^2)
    {
      MatrixField flat = S;
      for (std::size_t e = 0; e < static_cast<std::size_t>(flat.r) * flat.r; ++e) {
        cplx* s = flat.v.data() + e * g.npts;
        for (std::size_t p = 0; p < g.npts; ++p) {
          double k2 = 0.0;
          for (int d = 0; d < g.real_dim(); ++d) {
            const std::size_t m =
                (p / g.strides[d]) % static_cast<std::size_t>(g.dims[d]);
            const double kv = g.wavenumbers[d][m];
            k2 += kv * kv;
          }
          s[p] *= k2;
        }
      }
      detail::fft_all_slices(flat, false);
      axpy(out.comp[k], 1.0, flat);
    }
    // divergence of the bracket fields: - sum_d d_d [A_d, v]
    {
      MatrixField div_spec(v.geom, v.r);
      for (int d = 0; d < g.real_dim(); ++d) {
        MatrixField B = bracket(A.comp[d], vk);
        MatrixField Bs = spectrum(B);
        for (std::size_t e = 0; e < static_cast<std::size_t>(Bs.r) * Bs.r; ++e)
          detail::apply_ik(g, Bs.v.data() + e * g.npts, d, 1);
        axpy(div_spec, -1.0, Bs);
      }
      detail::fft_all_slices(div_spec, false);
      axpy(out.comp[k], 1.0, div_spec);
    }
    // remaining pointwise brackets: - sum_d ([A_d, d_d v] + [A_d, [A_d, v]])
    for (int d = 0; d < g.real_dim(); ++d) {
      MatrixField dv = derivative_from_spectrum(S, d);
      bracket_acc(out.comp[k], A.comp[d], dv, -1.0);
      MatrixField B = bracket(A.comp[d], vk);
      bracket_acc(out.comp[k], A.comp[d], B, -1.0);
    }
  }
  return out;
}

namespace detail {

inline double vdot(const HiggsField& a, const HiggsField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.comp.size(); ++k)
    s += pair_l2(a.comp[k], b.comp[k]).real();
  return s;
}

inline void vaxpy(HiggsField& y, double c, const HiggsField& x) {
  for (std::size_t k = 0; k < y.comp.size(); ++k) axpy(y.comp[k], c, x.comp[k]);
}

inline void vscale(HiggsField& y, double c) {
  for (auto& comp : y.comp) scale(comp, c);
}

/// sum_{d,k} int |nabla_d v_k|^2 (plain, no form weights).
inline double dirichlet(const Connection& A, const HiggsField& v) {
  double s = 0.0;
  for (int k = 0; k < v.geom->n; ++k)
    for (int d = 0; d < v.geom->real_dim(); ++d)
      s += norm_sq_l2(nabla_dir(A, v.comp[k], d));
  return s;
}

/// Gradient of the wedge penalty P(v) = int |[v0,v1]|_F^2 (n = 2 only):
/// dP = 2 Re <dv, gradP>.
inline HiggsField wedge_penalty_gradient(const HiggsField& v, MatrixField& W) {
  HiggsField g(v.geom, v.r);
  if (v.geom->n != 2) return g;
  W = bracket(v.comp[0], v.comp[1]);
  g.comp[0] = bracket(W, adjoint(v.comp[1]));
  g.comp[1] = bracket(adjoint(v.comp[0]), W);
  return g;
}

inline void remove_mean(HiggsField& v) {
  for (auto& comp : v.comp) {
    const double inv = 1.0 / static_cast<double>(comp.npts());
    for (int i = 0; i < comp.r; ++i)
      for (int j = 0; j < comp.r; ++j) {
        cplx* s = comp.slice(i, j);
        cplx mean{};
        for (std::size_t p = 0; p < comp.npts(); ++p) mean += s[p];
        mean *= inv;
        for (std::size_t p = 0; p < comp.npts(); ++p) s[p] -= mean;
      }
  }
}

/// Apply (kappa - Laplacian)^{-1} componentwise in Fourier space.
inline HiggsField precondition(const HiggsField& r, double kappa) {
  HiggsField z(r.geom, r.r);
  const auto& g = *r.geom;
  for (std::size_t k = 0; k < r.comp.size(); ++k) {
    MatrixField S = spectrum(r.comp[k]);
    for (std::size_t e = 0; e < static_cast<std::size_t>(S.r) * S.r; ++e) {
      cplx* s = S.v.data() + e * g.npts;
      for (std::size_t p = 0; p < g.npts; ++p) {
        double k2 = 0.0;
        for (int d = 0; d < g.real_dim(); ++d) {
          const std::size_t m = (p / g.strides[d]) % static_cast<std::size_t>(g.dims[d]);
          const double kv = g.wavenumbers[d][m];
          k2 += kv * kv;
        }
        s[p] /= (kappa + k2);
      }
    }
    z.comp[k] = from_spectrum(S);
  }
  return z;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Least eigenvalue of nabla* nabla on { v : v ^ v = 0 }
// ---------------------------------------------------------------------------

struct EigenOptions {
  std::vector<double> penalties = {1.0, 10.0, 100.0, 1000.0, 10000.0};
  int max_iter = 600;        // per penalty stage
  double grad_tol = 1e-9;    // residual norm target
  std::uint64_t seed = 7;
  bool exclude_zero_mode = false;  // diagnostic: restrict to mean-zero v
  std::optional<HiggsField> initial;
};

struct EigenResult {
  double lambda_hat = 0.0;
  HiggsField v;
  double wedge_feasibility = 0.0;  // ||v ^ v||_L2 at the reported v
  std::vector<std::pair<double, double>> penalty_trace;  // (mu, quotient)
  bool converged = false;
  int iterations = 0;
};

/// Minimize the Rayleigh quotient <nabla* nabla v, v>/||v||^2 over (1,0)-forms
/// with the cone constraint v ^ v = 0 imposed by quadratic penalty
/// continuation, using preconditioned conjugate-gradient iteration on the
/// unit sphere with a flat-Laplacian preconditioner. The reported quotient is
/// an upper bound on the constrained infimum; feasibility at the minimizer is
/// reported alongside.
inline EigenResult least_eigenvalue(const Connection& A,
                                    const EigenOptions& opt = {}) {
  const auto& g = *A.geom;
  EigenResult out;
  out.v = HiggsField(A.geom, A.r);

  // initial vector: constants plus a rough band-limited part
  if (opt.initial.has_value()) {
    out.v = *opt.initial;
  } else {
    FieldRng rng(opt.seed);
    for (int k = 0; k < g.n; ++k) {
      MatrixField c(A.geom, A.r);
      for (int i = 0; i < A.r; ++i)
        for (int j = 0; j < A.r; ++j) {
          const cplx z = rng.unit_box();
          cplx* s = c.slice(i, j);
          std::fill(s, s + c.npts(), z);
        }
      out.v.comp[k] = std::move(c);
      MatrixField rough = random_matrix_field(A.geom, A.r, rng, 2, 0.5);
      axpy(out.v.comp[k], 1.0, rough);
    }
  }
  if (opt.exclude_zero_mode) detail::remove_mean(out.v);
  {
    const double nn = std::sqrt(detail::vdot(out.v, out.v));
    if (nn == 0.0) throw std::invalid_argument("least_eigenvalue: zero start");
    detail::vscale(out.v, 1.0 / nn);
  }

  std::vector<double> stages =
      (g.n == 2) ? opt.penalties : std::vector<double>{0.0};
  const double k1 = 2.0 * std::numbers::pi / g.sides[0];
  int total_iters = 0;
  bool all_converged = true;

  for (double mu : stages) {
    HiggsField v = out.v;
    HiggsField dir(A.geom, A.r);
    double rr_prev = 0.0;
    bool have_dir = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      HiggsField Lv = rough_laplacian_apply(A, v);
      MatrixField W(A.geom, A.r);
      HiggsField Pg = detail::wedge_penalty_gradient(v, W);
      HiggsField Ev = Lv;
      if (mu > 0.0) detail::vaxpy(Ev, mu, Pg);
      const double m = detail::vdot(v, v);
      const double E = detail::vdot(Ev, v);
      const double J = E / m;
      HiggsField r = Ev;
      detail::vaxpy(r, -J, v);
      if (opt.exclude_zero_mode) detail::remove_mean(r);
      const double rn = std::sqrt(detail::vdot(r, r));
      if (rn <= opt.grad_tol * (1.0 + std::abs(J))) break;

      HiggsField z = detail::precondition(r, std::abs(J) + k1 * k1);
      if (opt.exclude_zero_mode) detail::remove_mean(z);
      const double rr = detail::vdot(z, r);
      double beta = 0.0;
      if (have_dir && rr_prev > 0.0 && (it % 40) != 0)
        beta = std::max(0.0, rr / rr_prev);
      rr_prev = rr;
      if (!have_dir) {
        dir = z;
        detail::vscale(dir, -1.0);
      } else {
        detail::vscale(dir, beta);
        detail::vaxpy(dir, -1.0, z);
      }
      have_dir = true;
      // keep the search direction tangent to the sphere
      {
        const double c = detail::vdot(dir, v) / m;
        detail::vaxpy(dir, -c, v);
      }

      // exact polynomial coefficients of J(v + t d)
      HiggsField Ld = rough_laplacian_apply(A, dir);
      const double q0 = detail::vdot(Lv, v);
      const double q1 = 2.0 * detail::vdot(Lv, dir);
      const double q2 = detail::vdot(Ld, dir);
      double p0 = 0.0, p1 = 0.0, p2 = 0.0, p3 = 0.0, p4 = 0.0;
      if (mu > 0.0) {
        MatrixField U = bracket(dir.comp[0], v.comp[1]);
        bracket_acc(U, v.comp[0], dir.comp[1]);
        MatrixField V = bracket(dir.comp[0], dir.comp[1]);
        p0 = norm_sq_l2(W);
        p1 = 2.0 * pair_l2(U, W).real();
        p2 = norm_sq_l2(U) + 2.0 * pair_l2(V, W).real();
        p3 = 2.0 * pair_l2(V, U).real();
        p4 = norm_sq_l2(V);
      }
      const double d2 = detail::vdot(dir, dir);
      auto Jt = [&](double t) {
        const double num = q0 + q1 * t + q2 * t * t +
                           mu * (p0 + p1 * t + p2 * t * t + p3 * t * t * t +
                                 p4 * t * t * t * t);
        const double den = m + d2 * t * t;
        return num / den;
      };
      // bracketed scan plus golden-section refinement
      double t_scale = (q2 + mu * p2 + 1e-30);
      t_scale = std::abs(q1 + mu * p1) / (2.0 * std::abs(t_scale)) + 1e-12;
      double best_t = 0.0, best_J = J;
      for (int s = -24; s <= 8; ++s) {
        const double t = t_scale * std::pow(1.5, s);
        const double val = Jt(t);
        if (val < best_J) {
          best_J = val;
          best_t = t;
        }
      }
      if (best_t > 0.0) {
        double lo = best_t / 1.6, hi = best_t * 1.6;
        const double gr = 0.61803398874989484;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = Jt(x1), f2 = Jt(x2);
        for (int s = 0; s < 60; ++s) {
          if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = Jt(x1);
          } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = Jt(x2);
          }
        }
        best_t = 0.5 * (lo + hi);
      }
      if (best_t == 0.0) break;  // no descent direction found
      detail::vaxpy(v, best_t, dir);
      if (opt.exclude_zero_mode) detail::remove_mean(v);
      const double nn = std::sqrt(detail::vdot(v, v));
      detail::vscale(v, 1.0 / nn);
    }
    total_iters += it;
    if (it >= opt.max_iter) all_converged = false;
    out.v = v;
    const double quotient = detail::dirichlet(A, v) / detail::vdot(v, v);
    out.penalty_trace.push_back({mu, quotient});
  }

  // normalize in the convention norm and report
  {
    const double nn = std::sqrt(l2_sq(out.v));
    detail::vscale(out.v, 1.0 / nn);
  }
  out.lambda_hat = detail::dirichlet(A, out.v) / detail::vdot(out.v, out.v);
  out.wedge_feasibility = std::sqrt(l2_sq(wedge_square(out.v)));
  out.converged = all_converged;
  out.iterations = total_iters;
  return out;
}

// ---------------------------------------------------------------------------
// L^n-continuity of the least eigenvalue
// ---------------------------------------------------------------------------

struct ContinuityReport {
  double lambda0 = 0.0;
  double lambda = 0.0;
  double a_norm = 0.0;   // ||a||_{L^n}, n the real dimension
  double c_used = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  double implied_c_min = 0.0;  // smallest c validating both inequalities
};

/// Verify (1 - c||a||) lambda(A0) - c||a|| <= lambda(A)
///     and lambda(A) <= (1 - c||a||)^{-1} (lambda(A0) + c||a||)
/// for the perturbation a = A - A0, with the empirically calibrated c.
inline ContinuityReport eigen_continuity_check(const Connection& A0,
                                               const RealOneForm& a, double c,
                                               const EigenOptions& opt = {},
                                               double slack = 1e-9) {
  const double p = static_cast<double>(A0.geom->real_dim());
  ContinuityReport rep;
  rep.a_norm = lp_norm(a, p);
  rep.c_used = c;
  if (c * rep.a_norm > 0.5)
    throw std::invalid_argument(
        "eigen_continuity_check: ||a|| exceeds the smallness threshold");
  Connection A = A0;
  for (int d = 0; d < A0.geom->real_dim(); ++d) axpy(A.comp[d], 1.0, a.comp[d]);
  rep.lambda0 = least_eigenvalue(A0, opt).lambda_hat;
  rep.lambda = least_eigenvalue(A, opt).lambda_hat;
  const double x = c * rep.a_norm;
  rep.lower_ok = (1.0 - x) * rep.lambda0 - x <= rep.lambda + slack;
  rep.upper_ok = rep.lambda <= (rep.lambda0 + x) / (1.0 - x) + slack;
  double need = 0.0;
  if (rep.lambda > rep.lambda0)
    need = std::max(need, (rep.lambda - rep.lambda0) /
                              (rep.a_norm * (1.0 + rep.lambda)));
  if (rep.lambda0 > rep.lambda)
    need = std::max(need, (rep.lambda0 - rep.lambda) /
                              (rep.a_norm * (1.0 + rep.lambda0)));
  rep.implied_c_min = need;
  return rep;
}

// ---------------------------------------------------------------------------
// Logarithmic cutoff
// ---------------------------------------------------------------------------

namespace detail {

/// Quintic smoothstep transition profile: 1 below 0, 0 above 1, C^2.
inline double psi(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - (10.0 * s * s * s - 15.0 * s * s * s * s +
                6.0 * s * s * s * s * s);
}

inline double psi_prime(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = s * (1.0 - s);
  return -30.0 * u * u;
}

inline double psi_second(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

}  // namespace detail

/// beta_{N,R}(x) = psi(log(N |x| / R) / log N): equal to 1 for |x| <= R/N and
/// 0 for |x| >= R, sampled with the periodic distance from `center`.
inline ScalarField log_cutoff(const TorusGeometry& geom, TorusPtr gp, double N,
                              double R, const std::vector<double>& center) {
  if (N < 2.0) throw std::invalid_argument("log_cutoff: need N >= 2");
  if (!(R > 0.0) || R >= 0.5 * geom.shortest_period())
    throw std::invalid_argument(
        "log_cutoff: R must be below half the shortest period");
  double hmax = 0.0;
  for (int d = 0; d < geom.real_dim(); ++d)
    hmax = std::max(hmax, geom.sides[d] / geom.dims[d]);
  if (R / N < hmax)
    throw std::invalid_argument(
        "log_cutoff: inner plateau R/N below grid resolution");
  ScalarField beta(gp);
  const double logN = std::log(N);
  for (std::size_t p = 0; p < geom.npts; ++p) {
    const double rho = geom.periodic_distance(p, center);
    double s;
    if (rho <= R / N)
      s = 0.0;
    else if (rho >= R)
      s = 1.0;
    else
      s = std::log(N * rho / R) / logN;
    beta.v[p] = detail::psi(s);
  }
  return beta;
}

struct CutoffNorms {
  double grad_l4 = 0.0;   // ||grad beta||_{L^4}
  double hess_l2 = 0.0;   // ||grad^2 beta||_{L^2}
};

/// Closed-form radial quadrature of the cutoff norms on R^4. For the radial
/// profile f(rho) = psi(log(N rho / R)/log N),
///   |grad beta|   = |f'|,
///   |grad^2 beta|^2 = f''^2 + 3 (f'/rho)^2,
/// integrated against 2 pi^2 rho^3 drho over [R/N, R] by composite Simpson.
inline CutoffNorms cutoff_norms(double N, double R, int samples = 20000) {
  if (N < 2.0) throw std::invalid_argument("cutoff_norms: need N >= 2");
  if (samples % 2 != 0) ++samples;
  const double logN = std::log(N);
  const double lo = R / N, hi = R;
  const double h = (hi - lo) / samples;
  auto fprime = [&](double rho) {
    const double s = std::log(N * rho / R) / logN;
    return detail::psi_prime(s) / (rho * logN);
  };
  auto fsecond = [&](double rho) {
    const double s = std::log(N * rho / R) / logN;
    return (detail::psi_second(s) / logN - detail::psi_prime(s)) /
           (rho * rho * logN);
  };
  double i4 = 0.0, i2 = 0.0;
  const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
  for (int s = 0; s <= samples; ++s) {
    const double rho = lo + h * s;
    const double w = (s == 0 || s == samples) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
    const double fp = fprime(rho);
    const double fs = fsecond(rho);
    i4 += w * std::pow(std::abs(fp), 4.0) * rho * rho * rho;
    i2 += w * (fs * fs + 3.0 * (fp / rho) * (fp / rho)) * rho * rho * rho;
  }
  i4 *= two_pi_sq * h / 3.0;
  i2 *= two_pi_sq * h / 3.0;
  return {std::pow(i4, 0.25), std::sqrt(i2)};
}

// ---------------------------------------------------------------------------
// Weitzenboeck identity
// ---------------------------------------------------------------------------

struct WeitzenbockReport {
  double grad_term = 0.0;     // int |nabla_A theta|^2
  double ricci_term = 0.0;    // int <Ric_X o theta, theta>; 0 on flat tori
  double bracket_term = 0.0;  // int |[theta,theta*]|^2
  double rhs_term = 0.0;      // Re int <[i Lambda(F+[theta,theta*]), theta], theta>
  double residual = 0.0;      // |grad + ricci + bracket - rhs|
  bool constraint_warning = false;
};

/// int |nabla theta|^2 + int <Ric theta, theta> + int |[theta,theta*]|^2
///   = Re int <[i Lambda(F + [theta,theta*]), theta], theta>.
/// `ricci_scale` is the constant Ricci transformation; identically zero on
/// the flat torus but kept in the formula.
inline WeitzenbockReport weitzenbock_check(const Connection& A,
                                           const HiggsField& theta,
                                           double higgs_tol = 1e-6,
                                           double ricci_scale = 0.0) {
  WeitzenbockReport rep;
  rep.constraint_warning = !is_higgs_pair(A, theta, higgs_tol).pass;
  rep.grad_term = nabla_theta_l2_sq(A, theta);
  rep.ricci_term = ricci_scale * l2_sq(theta);
  FormOneOne tb = theta_bracket(theta);
  rep.bracket_term = l2_sq(tb);
  MatrixField ilg = lambda_contract(curvature(A).F);
  axpy(ilg, 1.0, lambda_contract(tb));
  double rhs = 0.0;
  for (int k = 0; k < theta.geom->n; ++k) {
    MatrixField b = bracket(ilg, theta.comp[k]);
    rhs += 2.0 * pair_l2(b, theta.comp[k]).real();
  }
  rep.rhs_term = rhs;
  rep.residual =
      std::abs(rep.grad_term + rep.ricci_term + rep.bracket_term - rep.rhs_term);
  return rep;
}

// ---------------------------------------------------------------------------
// Vanishing certificate (closing-theorem arithmetic)
// ---------------------------------------------------------------------------

enum class CertificateOutcome {
  theta_must_vanish,          // Einstein case rho > 0, hypothesis met
  parallel_commuting_higgs,   // Calabi-Yau case: kernel data, no contradiction
  hypothesis_not_met,         // sup residual exceeds rho/4
  inconclusive,
};

struct CertificateDecision {
  CertificateOutcome outcome = CertificateOutcome::inconclusive;
  bool coefficient_check = false;  // (rho - 2 eps) >= rho/2
  std::string detail;
};

/// Replays the closing inequality chain: with max|Theta| <= eps and Ricci
/// lower bound rho, the identity forces
///   0 >= (rho - 2 eps) ||theta||^2 >= (rho/2) ||theta||^2,
/// so a nonzero Higgs field is contradictory once eps <= rho/4. At rho = 0
/// the chain only yields nabla theta = 0 and [theta,theta*] = 0, the
/// parallel commuting case that full holonomy (not available on the torus)
/// would exclude.
inline CertificateDecision vanishing_certificate(const WeitzenbockReport& rep,
                                                 double rho, double sup_residual,
                                                 double tol = 1e-8) {
  CertificateDecision d;
  if (rho < 0.0)
    throw std::invalid_argument("vanishing_certificate: need rho >= 0");
  if (rho > 0.0) {
    d.coefficient_check = (rho - 2.0 * sup_residual) >= 0.5 * rho;
    if (!d.coefficient_check) {
      d.outcome = CertificateOutcome::hypothesis_not_met;
      d.detail = "sup residual exceeds rho/4; the chain does not close";
      return d;
    }
    d.outcome = CertificateOutcome::theta_must_vanish;
    d.detail =
        "grad + bracket >= 0 forces (rho - 2 eps)||theta||^2 <= 0; theta must "
        "vanish";
    return d;
  }
  if (rep.grad_term <= tol && rep.bracket_term <= tol) {
    d.outcome = CertificateOutcome::parallel_commuting_higgs;
    d.detail =
        "parallel commuting Higgs field: vanishing requires full holonomy, "
        "not verifiable on torus";
    return d;
  }
  d.outcome = CertificateOutcome::inconclusive;
  d.detail = "rho = 0 with nonzero gradient or bracket terms";
  return d;
}

}  // namespace ymh
