#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ymh/forms.hpp"

namespace ymh {

/// Unitary connection on the trivial rank-r bundle, A = sum_d coeff[d] dx_d
/// with anti-Hermitian coefficients (unitary w.r.t. the reference metric
/// H0 = Id of the trivialization).
using Connection = RealOneForm;

/// Higgs field theta = sum_k comp[k] dz_k, End(E)-valued (1,0)-form.
/// Adjoints are always taken w.r.t. H0.
using HiggsField = FormTen;

inline Connection zero_connection(TorusPtr g, int r) { return Connection(g, r); }
inline HiggsField zero_higgs(TorusPtr g, int r) { return HiggsField(g, r); }

// ---------------------------------------------------------------------------
// Complex components of a unitary connection:
//   a_k = (A_{2k} - i A_{2k+1})/2   (the (1,0) part)
//   b_k = (A_{2k} + i A_{2k+1})/2 = -a_k^*
// ---------------------------------------------------------------------------

inline MatrixField holo_coeff(const Connection& A, int k) {
  MatrixField a(A.geom, A.r);
  const MatrixField& ax = A.comp[2 * k];
  const MatrixField& ay = A.comp[2 * k + 1];
  const cplx mi(0.0, -0.5);
  for (std::size_t q = 0; q < a.v.size(); ++q)
    a.v[q] = 0.5 * ax.v[q] + mi * ay.v[q];
  return a;
}

inline MatrixField antiholo_coeff(const Connection& A, int k) {
  MatrixField b(A.geom, A.r);
  const MatrixField& ax = A.comp[2 * k];
  const MatrixField& ay = A.comp[2 * k + 1];
  const cplx pi2(0.0, 0.5);
  for (std::size_t q = 0; q < b.v.size(); ++q)
    b.v[q] = 0.5 * ax.v[q] + pi2 * ay.v[q];
  return b;
}

// ---------------------------------------------------------------------------
// Covariant derivatives. On End(E)-valued fields the connection acts by
// bracket. Complex derivatives follow d/dz_k = (d_{2k} - i d_{2k+1})/2.
// ---------------------------------------------------------------------------

/// nabla_d X = d_d X + [A_d, X] for a 0-form X, one real direction.
inline MatrixField nabla_dir(const Connection& A, const MatrixField& X, int d) {
  MatrixField out = derivative(X, d);
  bracket_acc(out, A.comp[d], X);
  return out;
}

/// Full covariant differential of a 0-form: (nabla_0 X, ..., nabla_{2n-1} X).
inline RealOneForm nabla(const Connection& A, const MatrixField& X) {
  RealOneForm out(X.geom, X.r);
  MatrixField S = spectrum(X);
  for (int d = 0; d < X.geom->real_dim(); ++d) {
    out.comp[d] = derivative_from_spectrum(S, d);
    bracket_acc(out.comp[d], A.comp[d], X);
  }
  return out;
}

/// D_k X = d_{z_k} X + [a_k, X].
inline MatrixField holo_derivative(const Connection& A, const MatrixField& X, int k) {
  MatrixField dx = derivative(X, 2 * k);
  MatrixField dy = derivative(X, 2 * k + 1);
  MatrixField out(X.geom, X.r);
  const cplx mi(0.0, -0.5);
  for (std::size_t q = 0; q < out.v.size(); ++q)
    out.v[q] = 0.5 * dx.v[q] + mi * dy.v[q];
  bracket_acc(out, holo_coeff(A, k), X);
  return out;
}

/// Dbar_k X = d_{zbar_k} X + [b_k, X].
inline MatrixField antiholo_derivative(const Connection& A, const MatrixField& X, int k) {
  MatrixField dx = derivative(X, 2 * k);
  MatrixField dy = derivative(X, 2 * k + 1);
  MatrixField out(X.geom, X.r);
  const cplx pi2(0.0, 0.5);
  for (std::size_t q = 0; q < out.v.size(); ++q)
    out.v[q] = 0.5 * dx.v[q] + pi2 * dy.v[q];
  bracket_acc(out, antiholo_coeff(A, k), X);
  return out;
}

/// dbar_A theta as a (1,1)-form: component (j,k) is -Dbar_k theta_j.
inline FormOneOne delbar(const Connection& A, const HiggsField& theta) {
  FormOneOne out(theta.geom, theta.r);
  for (int j = 0; j < theta.geom->n; ++j)
    for (int k = 0; k < theta.geom->n; ++k) {
      out.comp[j][k] = antiholo_derivative(A, theta.comp[j], k);
      scale(out.comp[j][k], -1.0);
    }
  return out;
}

/// del_A theta as a (2,0)-form: D_0 theta_1 - D_1 theta_0 (zero when n = 1).
inline FormTwoZero del(const Connection& A, const HiggsField& theta) {
  FormTwoZero out(theta.geom, theta.r);
  if (theta.geom->n == 2) {
    out.comp[0] = holo_derivative(A, theta.comp[1], 0);
    MatrixField t = holo_derivative(A, theta.comp[0], 1);
    axpy(out.comp[0], -1.0, t);
  }
  return out;
}

/// nabla_A theta: nabla of each (1,0)-component along each real direction.
/// Index [d][k] = nabla_d theta_k; carries the |dz|^2 = 2 weight in norms.
inline std::vector<std::vector<MatrixField>> nabla(const Connection& A,
                                                   const HiggsField& theta) {
  const int m = theta.geom->real_dim();
  std::vector<std::vector<MatrixField>> out(m);
  std::vector<MatrixField> spectra;
  spectra.reserve(theta.geom->n);
  for (int k = 0; k < theta.geom->n; ++k) spectra.push_back(spectrum(theta.comp[k]));
  for (int d = 0; d < m; ++d) {
    out[d].reserve(theta.geom->n);
    for (int k = 0; k < theta.geom->n; ++k) {
      MatrixField t = derivative_from_spectrum(spectra[k], d);
      bracket_acc(t, A.comp[d], theta.comp[k]);
      out[d].push_back(std::move(t));
    }
  }
  return out;
}

inline double nabla_theta_l2_sq(const Connection& A, const HiggsField& theta) {
  auto g = nabla(A, theta);
  double s = 0.0;
  for (const auto& row : g)
    for (const auto& c : row) s += norm_sq_l2(c);
  return 2.0 * s;
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

struct CurvatureResult {
  RealTwoForm F;
  double f02_l2 = 0.0;  // L2 norm of the (0,2) part, integrability residual
};

inline CurvatureResult curvature(const Connection& A) {
  const auto& g = *A.geom;
  CurvatureResult out{RealTwoForm(A.geom, A.r), 0.0};
  std::vector<MatrixField> spectra;
  spectra.reserve(g.real_dim());
  for (int d = 0; d < g.real_dim(); ++d) spectra.push_back(spectrum(A.comp[d]));
  for (int d = 0; d < g.real_dim(); ++d)
    for (int e = d + 1; e < g.real_dim(); ++e) {
      MatrixField f = derivative_from_spectrum(spectra[e], d);
      MatrixField t = derivative_from_spectrum(spectra[d], e);
      axpy(f, -1.0, t);
      bracket_acc(f, A.comp[d], A.comp[e]);
      out.F.at(d, e) = std::move(f);
    }
  if (g.n == 2) {
    auto parts = to_complex_parts(out.F);
    out.f02_l2 = std::sqrt(l2_sq(parts.p02));
  }
  return out;
}

/// L2 residual of the Bianchi identity d_A F_A = 0.
inline double bianchi_residual(const Connection& A, const RealTwoForm& F) {
  const auto& g = *A.geom;
  double s = 0.0;
  for (int d = 0; d < g.real_dim(); ++d)
    for (int e = d + 1; e < g.real_dim(); ++e)
      for (int f = e + 1; f < g.real_dim(); ++f) {
        MatrixField t = nabla_dir(A, F.at(e, f), d);
        MatrixField u = nabla_dir(A, F.at(d, f), e);
        MatrixField w = nabla_dir(A, F.at(d, e), f);
        axpy(t, -1.0, u);
        axpy(t, 1.0, w);
        s += norm_sq_l2(t);
      }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Higgs-field algebra
// ---------------------------------------------------------------------------

/// theta ^ theta as a (2,0)-form: [theta_0, theta_1] for n = 2, zero for n = 1.
inline FormTwoZero wedge_square(const HiggsField& theta) {
  FormTwoZero out(theta.geom, theta.r);
  if (theta.geom->n == 2) out.comp[0] = bracket(theta.comp[0], theta.comp[1]);
  return out;
}

/// [theta, theta^*] as a (1,1)-form: component (j,k) = [theta_j, theta_k^*].
inline FormOneOne theta_bracket(const HiggsField& theta) {
  FormOneOne out(theta.geom, theta.r);
  std::vector<MatrixField> adj;
  adj.reserve(theta.geom->n);
  for (int k = 0; k < theta.geom->n; ++k) adj.push_back(adjoint(theta.comp[k]));
  for (int j = 0; j < theta.geom->n; ++j)
    for (int k = 0; k < theta.geom->n; ++k)
      out.comp[j][k] = bracket(theta.comp[j], adj[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Gauge transformations
// ---------------------------------------------------------------------------

struct GaugeTransform {
  enum class Flavor { unitary, complex };
  MatrixField values;
  Flavor flavor = Flavor::complex;
};

inline double unitary_defect(const MatrixField& s) {
  MatrixField u = mul(s, adjoint(s));
  MatrixField I = identity_field(s.geom, s.r);
  axpy(u, -1.0, I);
  return max_abs(u);
}

/// Largest pointwise condition number (2-norm) of the transform.
inline double max_condition_number(const MatrixField& s) {
  const int r = s.r;
  Eigen::MatrixXcd m(r, r);
  double worst = 1.0;
  for (std::size_t p = 0; p < s.npts(); ++p) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) m(i, j) = s.at(p, i, j);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double smin = svd.singularValues()(r - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, smax / smin);
  }
  return worst;
}

/// Complex gauge action on a pair:
///   b'_k = b_k - (Dbar_k s) s^{-1}
///   a'_k = a_k + ((Dbar_k s) s^{-1})^*
///   theta'_k = s theta_k s^{-1}
/// For unitary s this is the usual unitary gauge transformation; the output
/// connection coefficients are anti-Hermitian by construction.
inline std::pair<Connection, HiggsField> gauge_apply(const GaugeTransform& g,
                                                     const Connection& A,
                                                     const HiggsField& theta) {
  if (max_condition_number(g.values) > 1e8)
    throw std::domain_error("gauge_apply: transform numerically singular");
  const auto& geom = *A.geom;
  MatrixField sinv = inverse_field(g.values);
  Connection Aout(A.geom, A.r);
  for (int k = 0; k < geom.n; ++k) {
    MatrixField ds = antiholo_derivative(A, g.values, k);  // Dbar_k s
    MatrixField q = mul(ds, sinv);                         // (Dbar_k s) s^{-1}
    MatrixField a = holo_coeff(A, k);
    MatrixField b = antiholo_coeff(A, k);
    axpy(b, -1.0, q);
    MatrixField qa = adjoint(q);
    axpy(a, 1.0, qa);
    // A_{2k} = a + b, A_{2k+1} = i(a - b)
    MatrixField& ax = Aout.comp[2 * k];
    MatrixField& ay = Aout.comp[2 * k + 1];
    const cplx I(0.0, 1.0);
    for (std::size_t q2 = 0; q2 < ax.v.size(); ++q2) {
      ax.v[q2] = a.v[q2] + b.v[q2];
      ay.v[q2] = I * (a.v[q2] - b.v[q2]);
    }
  }
  HiggsField tout(theta.geom, theta.r);
  for (int k = 0; k < geom.n; ++k)
    tout.comp[k] = mul(mul(g.values, theta.comp[k]), sinv);
  return {std::move(Aout), std::move(tout)};
}

// ---------------------------------------------------------------------------
// Higgs-pair constraint report
// ---------------------------------------------------------------------------

struct ConstraintReport {
  double holomorphicity = 0.0;  // L2 norm of dbar_A theta
  double wedge = 0.0;           // L2 norm of theta ^ theta
  double integrability = 0.0;   // L2 norm of F^{0,2}
  double tol = 0.0;
  bool pass = false;
};

inline ConstraintReport is_higgs_pair(const Connection& A, const HiggsField& theta,
                                      double tol) {
  ConstraintReport rep;
  rep.holomorphicity = std::sqrt(l2_sq(delbar(A, theta)));
  rep.wedge = std::sqrt(l2_sq(wedge_square(theta)));
  rep.integrability = curvature(A).f02_l2;
  rep.tol = tol;
  rep.pass = rep.holomorphicity <= tol && rep.wedge <= tol &&
             rep.integrability <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Sobolev norms with covariant derivatives
// ---------------------------------------------------------------------------

/// || u ||_{L^p_{k,A}} = (sum_{j<=k} int |nabla_A^j u|^p)^{1/p} for 0-forms.
inline double sobolev_norm(const Connection& A, const MatrixField& u, int k,
                           double p) {
  if (k < 0 || k > 2)
    throw std::invalid_argument("sobolev_norm: only k in {0,1,2} supported");
  if (p < 1.0) throw std::invalid_argument("sobolev_norm: need p >= 1");
  const auto& g = *u.geom;
  std::vector<std::vector<double>> levels;
  levels.push_back(frobenius_sq(u));
  if (k >= 1) {
    auto du = nabla(A, u);
    std::vector<double> s(g.npts, 0.0);
    for (const auto& c : du.comp) {
      auto f = frobenius_sq(c);
      for (std::size_t q = 0; q < s.size(); ++q) s[q] += f[q];
    }
    levels.push_back(std::move(s));
    if (k == 2) {
      std::vector<double> s2(g.npts, 0.0);
      for (const auto& c : du.comp) {
        auto ddu = nabla(A, c);
        for (const auto& cc : ddu.comp) {
          auto f = frobenius_sq(cc);
          for (std::size_t q = 0; q < s2.size(); ++q) s2[q] += f[q];
        }
      }
      levels.push_back(std::move(s2));
    }
  }
  double total = 0.0;
  for (const auto& lvl : levels) {
    double acc = 0.0;
    for (double x : lvl) acc += std::pow(x, p / 2.0);
    total += acc * g.cell_weight();
  }
  return std::pow(total, 1.0 / p);
}

/// L^p norm of a real 1-form, |a| = sqrt(sum_d |a_d|_F^2) pointwise.
inline double lp_norm(const RealOneForm& a, double p) {
  const auto& g = *a.geom;
  std::vector<double> s(g.npts, 0.0);
  for (const auto& c : a.comp) {
    auto f = frobenius_sq(c);
    for (std::size_t q = 0; q < s.size(); ++q) s[q] += f[q];
  }
  double acc = 0.0;
  for (double x : s) acc += std::pow(x, p / 2.0);
  return std::pow(acc * g.cell_weight(), 1.0 / p);
}

}  // namespace ymh
