#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "ymh/bundle.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// Hermitian-Einstein residual and Einstein constant
// ---------------------------------------------------------------------------

/// lambda = int tr(i Lambda F_A) / (rank * vol). Identically ~0 for periodic
/// trivial-bundle data; computed rather than assumed so the general code path
/// is exercised.
inline double einstein_constant(const Connection& A) {
  auto cur = curvature(A);
  MatrixField t = lambda_contract(cur.F);
  const cplx s = integrate(trace(t));
  return s.real() / (static_cast<double>(A.r) * A.geom->volume());
}

struct HeResidual {
  MatrixField field;   // Theta = i Lambda(F + [theta,theta*]) - lambda Id
  double sup = 0.0;    // max pointwise Frobenius norm
  double l2 = 0.0;     // L2 norm
  double lambda = 0.0;
};

namespace detail {

inline HeResidual he_residual_from(const RealTwoForm& F, const HiggsField& theta,
                                   int rank, double lambda) {
  HeResidual out{lambda_contract(F), 0.0, 0.0, lambda};
  MatrixField tb = lambda_contract(theta_bracket(theta));
  axpy(out.field, 1.0, tb);
  MatrixField I = identity_field(out.field.geom, rank);
  axpy(out.field, -lambda, I);
  auto f2 = frobenius_sq(out.field);
  double mx = 0.0, acc = 0.0;
  for (double x : f2) {
    mx = std::max(mx, x);
    acc += x;
  }
  out.sup = std::sqrt(mx);
  out.l2 = std::sqrt(acc * out.field.geom->cell_weight());
  return out;
}

}  // namespace detail

inline HeResidual he_residual(const Connection& A, const HiggsField& theta) {
  auto cur = curvature(A);
  return detail::he_residual_from(cur.F, theta, A.r, einstein_constant(A));
}

// ---------------------------------------------------------------------------
// Energy density and YMH energy
// ---------------------------------------------------------------------------

/// e(A,theta) = |F_A + [theta,theta*]|^2 + 2 |del_A theta|^2 pointwise.
inline std::vector<double> energy_density(const Connection& A,
                                          const HiggsField& theta) {
  auto cur = curvature(A);
  RealTwoForm G = std::move(cur.F);
  RealTwoForm tb = to_real(theta_bracket(theta));
  for (std::size_t c = 0; c < G.comp.size(); ++c) axpy(G.comp[c], 1.0, tb.comp[c]);
  std::vector<double> e = pointwise_sq(G);
  if (A.geom->n == 2) {
    auto ps = pointwise_sq(del(A, theta));
    for (std::size_t p = 0; p < e.size(); ++p) e[p] += 2.0 * ps[p];
  }
  return e;
}

inline double ymh_energy(const Connection& A, const HiggsField& theta) {
  return integrate_real(energy_density(A, theta), *A.geom);
}

// ---------------------------------------------------------------------------
// Chern-Weil integrals
//
// Curvature coefficients are anti-Hermitian, so c1 = (i/2pi) tr F and
// c2 = (1/8pi^2)(tr(F^F) - tr F ^ tr F); with these signs
// 4pi^2 (2 c2 - c1^2) = tr(F ^ F) and the energy identity closes. Both
// integrals vanish for trivial periodic data, which is all the acceptance
// checks use.
// ---------------------------------------------------------------------------

struct ChernNumbers {
  double c1_integral = 0.0;  // int c1 ^ omega^{n-1}/(n-1)!
  double c2_combination_integral = 0.0;  // 4pi^2 int (2c2 - c1^2), 0 when n=1
};

inline ChernNumbers chern_numbers(const Connection& A) {
  ChernNumbers out;
  auto cur = curvature(A);
  const RealTwoForm& F = cur.F;
  {
    MatrixField ilf = lambda_contract(F);
    out.c1_integral =
        integrate(trace(ilf)).real() / (2.0 * std::numbers::pi);
  }
  if (A.geom->n == 2) {
    // 4-form coefficient of tr(F ^ F):
    // 2 tr(F01 F23) - 2 tr(F02 F13) + 2 tr(F03 F12)
    ScalarField s(A.geom);
    auto acc_tr_prod = [&](const MatrixField& X, const MatrixField& Y, double w) {
      for (int i = 0; i < X.r; ++i)
        for (int k = 0; k < X.r; ++k) {
          const cplx* x = X.slice(i, k);
          const cplx* y = Y.slice(k, i);
          for (std::size_t p = 0; p < s.v.size(); ++p) s.v[p] += w * x[p] * y[p];
        }
    };
    acc_tr_prod(F.at(0, 1), F.at(2, 3), 2.0);
    acc_tr_prod(F.at(0, 2), F.at(1, 3), -2.0);
    acc_tr_prod(F.at(0, 3), F.at(1, 2), 2.0);
    out.c2_combination_integral = integrate(s).real();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy identity report
// ---------------------------------------------------------------------------

struct EnergyReport {
  double ymh = 0.0;
  double residual_term = 0.0;     // int |i Lambda(F+[theta,theta*]) - lambda|^2
  double constant_term = 0.0;     // lambda^2 rank vol
  double topological_term = 0.0;  // 4pi^2 int (2c2 - c1^2) ^ omega^{n-2}/(n-2)!
  double identity_gap = 0.0;      // ymh - (residual + constant + topological)
};

inline EnergyReport energy_report(const Connection& A, const HiggsField& theta) {
  EnergyReport rep;
  rep.ymh = ymh_energy(A, theta);
  auto res = he_residual(A, theta);
  rep.residual_term = res.l2 * res.l2;
  rep.constant_term =
      res.lambda * res.lambda * static_cast<double>(A.r) * A.geom->volume();
  rep.topological_term = chern_numbers(A).c2_combination_integral;
  rep.identity_gap =
      rep.ymh - (rep.residual_term + rep.constant_term + rep.topological_term);
  return rep;
}

// ---------------------------------------------------------------------------
// Parabolic local energy (space-time cylinder diagnostic)
// ---------------------------------------------------------------------------

struct EnergySample {
  double t = 0.0;
  std::vector<double> e;  // energy density on the grid
};

/// r^{2-2n} * integral over B_r(x0) x [t0 - r^2, t0 + r^2] of e, using the
/// discrete metric ball and trapezoid quadrature over the stored samples.
inline double local_parabolic_energy(const TorusGeometry& geom,
                                     const std::vector<EnergySample>& samples,
                                     const std::vector<double>& x0, double t0,
                                     double r) {
  if (!(r > 0.0) || r > 0.5 * geom.shortest_period())
    throw std::invalid_argument(
        "local_parabolic_energy: radius must be positive and at most half the "
        "shortest period");
  const double t_lo = t0 - r * r, t_hi = t0 + r * r;
  if (samples.size() < 2 || samples.front().t > t_lo || samples.back().t < t_hi)
    throw std::invalid_argument(
        "local_parabolic_energy: stored samples do not cover the time window");

  std::vector<char> mask(geom.npts, 0);
  for (std::size_t p = 0; p < geom.npts; ++p)
    mask[p] = geom.periodic_distance(p, x0) <= r ? 1 : 0;
  auto ball_integral = [&](const std::vector<double>& e) {
    double s = 0.0;
    for (std::size_t p = 0; p < e.size(); ++p)
      if (mask[p]) s += e[p];
    return s * geom.cell_weight();
  };

  // clipped trapezoid over sample times
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    double a = samples[i].t, b = samples[i + 1].t;
    if (b <= t_lo || a >= t_hi) continue;
    const double fa = ball_integral(samples[i].e);
    const double fb = ball_integral(samples[i + 1].e);
    const double lo = std::max(a, t_lo), hi = std::min(b, t_hi);
    auto lerp = [&](double t) {
      const double w = (b > a) ? (t - a) / (b - a) : 0.0;
      return fa + (fb - fa) * w;
    };
    acc += 0.5 * (lerp(lo) + lerp(hi)) * (hi - lo);
  }
  return std::pow(r, 2.0 - 2.0 * geom.n) * acc;
}

}  // namespace ymh
