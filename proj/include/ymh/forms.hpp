#pragma once

#include <array>
#include <utility>
#include <vector>

#include "ymh/field.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// Norm conventions (the convention sheet)
//
// Pointwise inner products contract form indices with the flat metric in the
// real orthonormal coframe dx_0..dx_{2n-1}:
//   0-forms            |M|^2   = |M|_F^2
//   real 1-forms       |a|^2   = sum_d |a_d|_F^2
//   real 2-forms       |F|^2   = sum_{d<e} |F_de|_F^2
//   (1,0)-forms        |t|^2   = 2 sum_k |t_k|_F^2          (|dz|^2 = 2)
//   (1,1)-forms        |G|^2   = 4 sum_{jk} |G_jk|_F^2
//   (2,0)/(0,2)-forms  |P|^2   = 4 sum_{j<k} |P_jk|_F^2
// The real and complex conventions agree under the basis change below, and
// i Lambda_omega applied to omega yields n.
// ---------------------------------------------------------------------------

/// Real-coefficient 1-form with End(E) values: A = sum_d comp[d] dx_d.
struct RealOneForm {
  TorusPtr geom;
  int r = 0;
  std::vector<MatrixField> comp;  // 2n entries

  RealOneForm() = default;
  RealOneForm(TorusPtr g, int rank) : geom(g), r(rank) {
    comp.reserve(g->real_dim());
    for (int d = 0; d < g->real_dim(); ++d) comp.emplace_back(g, rank);
  }
};

/// End(E)-valued (1,0)-form: t = sum_k comp[k] dz_k.
struct FormTen {
  TorusPtr geom;
  int r = 0;
  std::vector<MatrixField> comp;  // n entries

  FormTen() = default;
  FormTen(TorusPtr g, int rank) : geom(g), r(rank) {
    comp.reserve(g->n);
    for (int k = 0; k < g->n; ++k) comp.emplace_back(g, rank);
  }
};

/// End(E)-valued (1,1)-form: G = sum_{j,k} comp[j][k] dz_j ^ dzbar_k.
struct FormOneOne {
  TorusPtr geom;
  int r = 0;
  std::vector<std::vector<MatrixField>> comp;  // n x n

  FormOneOne() = default;
  FormOneOne(TorusPtr g, int rank) : geom(g), r(rank) {
    comp.resize(g->n);
    for (int j = 0; j < g->n; ++j)
      for (int k = 0; k < g->n; ++k) comp[j].emplace_back(g, rank);
  }
};

/// End(E)-valued (2,0)-form; single component dz_0 ^ dz_1, empty when n = 1.
struct FormTwoZero {
  TorusPtr geom;
  int r = 0;
  std::vector<MatrixField> comp;  // 0 or 1 entries

  FormTwoZero() = default;
  FormTwoZero(TorusPtr g, int rank) : geom(g), r(rank) {
    if (g->n == 2) comp.emplace_back(g, rank);
  }
};

/// Real-coefficient 2-form: F = sum_{d<e} comp[pair(d,e)] dx_d ^ dx_e.
struct RealTwoForm {
  TorusPtr geom;
  int r = 0;
  std::vector<MatrixField> comp;  // C(2n,2) entries, index via pair_index

  RealTwoForm() = default;
  RealTwoForm(TorusPtr g, int rank) : geom(g), r(rank) {
    const int m = g->real_dim();
    comp.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int d = 0; d < m; ++d)
      for (int e = d + 1; e < m; ++e) comp.emplace_back(g, rank);
  }

  int pair_index(int d, int e) const {
    const int m = geom->real_dim();
    // position of (d,e), d<e, in lexicographic order
    return d * (2 * m - d - 1) / 2 + (e - d - 1);
  }
  MatrixField& at(int d, int e) { return comp[pair_index(d, e)]; }
  const MatrixField& at(int d, int e) const { return comp[pair_index(d, e)]; }
};

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

inline double l2_sq(const RealOneForm& a) {
  double s = 0.0;
  for (const auto& c : a.comp) s += norm_sq_l2(c);
  return s;
}

inline double l2_sq(const FormTen& t) {
  double s = 0.0;
  for (const auto& c : t.comp) s += norm_sq_l2(c);
  return 2.0 * s;
}

inline double l2_sq(const FormOneOne& G) {
  double s = 0.0;
  for (const auto& row : G.comp)
    for (const auto& c : row) s += norm_sq_l2(c);
  return 4.0 * s;
}

inline double l2_sq(const FormTwoZero& P) {
  double s = 0.0;
  for (const auto& c : P.comp) s += norm_sq_l2(c);
  return 4.0 * s;
}

inline double l2_sq(const RealTwoForm& F) {
  double s = 0.0;
  for (const auto& c : F.comp) s += norm_sq_l2(c);
  return s;
}

/// Pointwise |.|^2 of a real 2-form as a real field.
inline std::vector<double> pointwise_sq(const RealTwoForm& F) {
  std::vector<double> out(F.geom->npts, 0.0);
  for (const auto& c : F.comp) {
    auto f = frobenius_sq(c);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += f[p];
  }
  return out;
}

inline std::vector<double> pointwise_sq(const FormOneOne& G) {
  std::vector<double> out(G.geom->npts, 0.0);
  for (const auto& row : G.comp)
    for (const auto& c : row) {
      auto f = frobenius_sq(c);
      for (std::size_t p = 0; p < out.size(); ++p) out[p] += 4.0 * f[p];
    }
  return out;
}

inline std::vector<double> pointwise_sq(const FormTwoZero& P) {
  std::vector<double> out(P.geom->npts, 0.0);
  for (const auto& c : P.comp) {
    auto f = frobenius_sq(c);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += 4.0 * f[p];
  }
  return out;
}

inline std::vector<double> pointwise_sq(const FormTen& t) {
  std::vector<double> out(t.geom->npts, 0.0);
  for (const auto& c : t.comp) {
    auto f = frobenius_sq(c);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += 2.0 * f[p];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Basis changes between the real and complex descriptions of 2-forms.
// With z_k = x_{2k} + i x_{2k+1}:
//   dz_j ^ dzbar_j = -2i dx_{2j} ^ dx_{2j+1}
// and for n = 2 the mixed blocks follow the expansions in to_complex/to_real.
// ---------------------------------------------------------------------------

struct ComplexTwoFormParts {
  FormTwoZero p20;
  FormOneOne p11;
  FormTwoZero p02;  // components of dzbar_0 ^ dzbar_1 stored in comp[0]
};

inline ComplexTwoFormParts to_complex_parts(const RealTwoForm& F) {
  const auto& g = *F.geom;
  ComplexTwoFormParts out{FormTwoZero(F.geom, F.r), FormOneOne(F.geom, F.r),
                          FormTwoZero(F.geom, F.r)};
  const cplx ihalf(0.0, 0.5);
  for (int k = 0; k < g.n; ++k) {
    // diagonal (1,1) block: G_kk = (i/2) F_{2k,2k+1}
    const MatrixField& f = F.at(2 * k, 2 * k + 1);
    MatrixField& gkk = out.p11.comp[k][k];
    for (std::size_t q = 0; q < f.v.size(); ++q) gkk.v[q] = ihalf * f.v[q];
  }
  if (g.n == 2) {
    const MatrixField& F02 = F.at(0, 2);
    const MatrixField& F03 = F.at(0, 3);
    const MatrixField& F12 = F.at(1, 2);
    const MatrixField& F13 = F.at(1, 3);
    MatrixField& b = out.p11.comp[0][1];
    MatrixField& c = out.p11.comp[1][0];
    MatrixField& p = out.p20.comp[0];
    MatrixField& q20 = out.p02.comp[0];
    const cplx I(0.0, 1.0);
    for (std::size_t q = 0; q < b.v.size(); ++q) {
      const cplx f02 = F02.v[q], f03 = F03.v[q], f12 = F12.v[q], f13 = F13.v[q];
      b.v[q] = 0.25 * (f02 + f13 + I * f03 - I * f12);
      c.v[q] = 0.25 * (-f02 - f13 + I * f03 - I * f12);
      p.v[q] = 0.25 * (f02 - f13 - I * f03 - I * f12);
      q20.v[q] = 0.25 * (f02 - f13 + I * f03 + I * f12);
    }
  }
  return out;
}

/// Real 2-form of a (1,1)-form (inverse of the (1,1) block above).
inline RealTwoForm to_real(const FormOneOne& G) {
  const auto& g = *G.geom;
  RealTwoForm F(G.geom, G.r);
  const cplx m2i(0.0, -2.0);
  for (int k = 0; k < g.n; ++k) {
    const MatrixField& gkk = G.comp[k][k];
    MatrixField& f = F.at(2 * k, 2 * k + 1);
    for (std::size_t q = 0; q < f.v.size(); ++q) f.v[q] = m2i * gkk.v[q];
  }
  if (g.n == 2) {
    const MatrixField& b = G.comp[0][1];
    const MatrixField& c = G.comp[1][0];
    const cplx I(0.0, 1.0);
    MatrixField& F02 = F.at(0, 2);
    MatrixField& F03 = F.at(0, 3);
    MatrixField& F12 = F.at(1, 2);
    MatrixField& F13 = F.at(1, 3);
    for (std::size_t q = 0; q < b.v.size(); ++q) {
      const cplx bq = b.v[q], cq = c.v[q];
      F02.v[q] = bq - cq;
      F03.v[q] = -I * (bq + cq);
      F12.v[q] = I * (bq + cq);
      F13.v[q] = bq - cq;
    }
  }
  return F;
}

// ---------------------------------------------------------------------------
// Kaehler contraction
// ---------------------------------------------------------------------------

/// sqrt(-1) Lambda_omega F for a real-coefficient 2-form:
/// i sum_k F_{2k,2k+1}. Hermitian when F is the curvature of a unitary
/// connection.
inline MatrixField lambda_contract(const RealTwoForm& F) {
  MatrixField out(F.geom, F.r);
  const cplx I(0.0, 1.0);
  for (int k = 0; k < F.geom->n; ++k) {
    const MatrixField& f = F.at(2 * k, 2 * k + 1);
    for (std::size_t q = 0; q < out.v.size(); ++q) out.v[q] += I * f.v[q];
  }
  return out;
}

/// sqrt(-1) Lambda_omega G for a (1,1)-form: 2 sum_k G_kk.
inline MatrixField lambda_contract(const FormOneOne& G) {
  MatrixField out(G.geom, G.r);
  for (int k = 0; k < G.geom->n; ++k)
    axpy(out, 2.0, G.comp[k][k]);
  return out;
}

/// The Kaehler form as a real 2-form tensored with the identity of End(E).
inline RealTwoForm omega_form(TorusPtr g, int r) {
  RealTwoForm w(g, r);
  for (int k = 0; k < g->n; ++k) w.at(2 * k, 2 * k + 1) = identity_field(g, r);
  return w;
}

}  // namespace ymh
