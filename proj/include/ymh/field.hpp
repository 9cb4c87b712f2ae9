#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ymh/geometry.hpp"

namespace ymh {

/// Complex scalar sampled on the periodic grid.
struct ScalarField {
  TorusPtr geom;
  std::vector<cplx> v;

  ScalarField() = default;
  explicit ScalarField(TorusPtr g) : geom(std::move(g)), v(geom->npts, cplx{}) {}
};

/// r x r complex matrix sampled on the periodic grid.
///
/// Storage is entry-major: the (i,j) entry of every grid point forms one
/// contiguous slice of length npts, so FFTs and vectorized pointwise kernels
/// both run on unit-stride data.
struct MatrixField {
  TorusPtr geom;
  int r = 0;
  std::vector<cplx> v;

  MatrixField() = default;
  MatrixField(TorusPtr g, int rank)
      : geom(std::move(g)), r(rank),
        v(geom->npts * static_cast<std::size_t>(rank) * rank, cplx{}) {}

  std::size_t npts() const { return geom->npts; }
  cplx* slice(int i, int j) {
    return v.data() + (static_cast<std::size_t>(i) * r + j) * geom->npts;
  }
  const cplx* slice(int i, int j) const {
    return v.data() + (static_cast<std::size_t>(i) * r + j) * geom->npts;
  }
  cplx& at(std::size_t p, int i, int j) {
    return v[(static_cast<std::size_t>(i) * r + j) * geom->npts + p];
  }
  const cplx& at(std::size_t p, int i, int j) const {
    return v[(static_cast<std::size_t>(i) * r + j) * geom->npts + p];
  }
};

// ---------------------------------------------------------------------------
// Linear arithmetic
// ---------------------------------------------------------------------------

inline void axpy(MatrixField& y, cplx a, const MatrixField& x) {
  assert(y.v.size() == x.v.size());
  for (std::size_t q = 0; q < y.v.size(); ++q) y.v[q] += a * x.v[q];
}

inline void scale(MatrixField& y, cplx a) {
  for (auto& e : y.v) e *= a;
}

inline MatrixField zeros_like(const MatrixField& x) {
  return MatrixField(x.geom, x.r);
}

// ---------------------------------------------------------------------------
// Pointwise matrix kernels
// ---------------------------------------------------------------------------

/// C += alpha * A * B pointwise.
inline void mul_acc(MatrixField& C, const MatrixField& A, const MatrixField& B,
                    cplx alpha = 1.0) {
  const int r = C.r;
  const std::size_t np = C.npts();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      cplx* c = C.slice(i, j);
      for (int k = 0; k < r; ++k) {
        const cplx* a = A.slice(i, k);
        const cplx* b = B.slice(k, j);
        for (std::size_t p = 0; p < np; ++p) c[p] += alpha * a[p] * b[p];
      }
    }
}

inline MatrixField mul(const MatrixField& A, const MatrixField& B) {
  MatrixField C(A.geom, A.r);
  mul_acc(C, A, B);
  return C;
}

/// C += alpha * [A, B] pointwise.
inline void bracket_acc(MatrixField& C, const MatrixField& A,
                        const MatrixField& B, cplx alpha = 1.0) {
  mul_acc(C, A, B, alpha);
  mul_acc(C, B, A, -alpha);
}

inline MatrixField bracket(const MatrixField& A, const MatrixField& B) {
  MatrixField C(A.geom, A.r);
  bracket_acc(C, A, B);
  return C;
}

/// Conjugate transpose pointwise.
inline MatrixField adjoint(const MatrixField& A) {
  MatrixField B(A.geom, A.r);
  const std::size_t np = A.npts();
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < A.r; ++j) {
      const cplx* a = A.slice(j, i);
      cplx* b = B.slice(i, j);
      for (std::size_t p = 0; p < np; ++p) b[p] = std::conj(a[p]);
    }
  return B;
}

inline ScalarField trace(const MatrixField& A) {
  ScalarField t(A.geom);
  for (int i = 0; i < A.r; ++i) {
    const cplx* a = A.slice(i, i);
    for (std::size_t p = 0; p < t.v.size(); ++p) t.v[p] += a[p];
  }
  return t;
}

inline MatrixField identity_field(TorusPtr g, int r, cplx value = 1.0) {
  MatrixField I(std::move(g), r);
  for (int i = 0; i < r; ++i) {
    cplx* s = I.slice(i, i);
    std::fill(s, s + I.npts(), value);
  }
  return I;
}

/// Pointwise squared Frobenius norm, |M(p)|_F^2, as a real-valued field.
inline std::vector<double> frobenius_sq(const MatrixField& A) {
  std::vector<double> out(A.npts(), 0.0);
  for (std::size_t e = 0; e < static_cast<std::size_t>(A.r) * A.r; ++e) {
    const cplx* a = A.v.data() + e * A.npts();
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += std::norm(a[p]);
  }
  return out;
}

inline double max_abs(const MatrixField& A) {
  double m = 0.0;
  for (const auto& e : A.v) m = std::max(m, std::abs(e));
  return m;
}

/// max_p deviation from anti-Hermitian, max |M + M^*|.
inline double antihermitian_defect(const MatrixField& A) {
  double m = 0.0;
  const std::size_t np = A.npts();
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < A.r; ++j) {
      const cplx* a = A.slice(i, j);
      const cplx* b = A.slice(j, i);
      for (std::size_t p = 0; p < np; ++p)
        m = std::max(m, std::abs(a[p] + std::conj(b[p])));
    }
  return m;
}

inline double hermitian_defect(const MatrixField& A) {
  double m = 0.0;
  const std::size_t np = A.npts();
  for (int i = 0; i < A.r; ++i)
    for (int j = 0; j < A.r; ++j) {
      const cplx* a = A.slice(i, j);
      const cplx* b = A.slice(j, i);
      for (std::size_t p = 0; p < np; ++p)
        m = std::max(m, std::abs(a[p] - std::conj(b[p])));
    }
  return m;
}

/// Pointwise matrix exponential by scaling-and-squaring with a plain series.
inline MatrixField exp_field(const MatrixField& A) {
  const int r = A.r;
  const std::size_t np = A.npts();
  MatrixField E(A.geom, r);
  std::vector<cplx> m(static_cast<std::size_t>(r) * r),
      term(static_cast<std::size_t>(r) * r), acc(static_cast<std::size_t>(r) * r),
      tmp(static_cast<std::size_t>(r) * r);
  for (std::size_t p = 0; p < np; ++p) {
    double norm1 = 0.0;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        m[static_cast<std::size_t>(i) * r + j] = A.at(p, i, j);
        norm1 = std::max(norm1, std::abs(A.at(p, i, j)));
      }
    int s = 0;
    while (norm1 * r > 0.5 && s < 30) {
      for (auto& e : m) e *= 0.5;
      norm1 *= 0.5;
      ++s;
    }
    // exp of the scaled matrix by Taylor series
    std::fill(acc.begin(), acc.end(), cplx{});
    std::fill(term.begin(), term.end(), cplx{});
    for (int i = 0; i < r; ++i) {
      acc[static_cast<std::size_t>(i) * r + i] = 1.0;
      term[static_cast<std::size_t>(i) * r + i] = 1.0;
    }
    for (int k = 1; k <= 24; ++k) {
      std::fill(tmp.begin(), tmp.end(), cplx{});
      for (int i = 0; i < r; ++i)
        for (int l = 0; l < r; ++l) {
          const cplx t = term[static_cast<std::size_t>(i) * r + l] / double(k);
          for (int j = 0; j < r; ++j)
            tmp[static_cast<std::size_t>(i) * r + j] +=
                t * m[static_cast<std::size_t>(l) * r + j];
        }
      term = tmp;
      for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += term[q];
    }
    for (int q = 0; q < s; ++q) {
      std::fill(tmp.begin(), tmp.end(), cplx{});
      for (int i = 0; i < r; ++i)
        for (int l = 0; l < r; ++l)
          for (int j = 0; j < r; ++j)
            tmp[static_cast<std::size_t>(i) * r + j] +=
                acc[static_cast<std::size_t>(i) * r + l] *
                acc[static_cast<std::size_t>(l) * r + j];
      acc = tmp;
    }
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) E.at(p, i, j) = acc[static_cast<std::size_t>(i) * r + j];
  }
  return E;
}

/// Pointwise matrix inverse (Gauss-Jordan with partial pivoting).
inline MatrixField inverse_field(const MatrixField& A) {
  const int r = A.r;
  const std::size_t np = A.npts();
  MatrixField B(A.geom, r);
  std::vector<cplx> m(static_cast<std::size_t>(r) * 2 * r);
  for (std::size_t p = 0; p < np; ++p) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        m[static_cast<std::size_t>(i) * 2 * r + j] = A.at(p, i, j);
        m[static_cast<std::size_t>(i) * 2 * r + r + j] = (i == j) ? 1.0 : 0.0;
      }
    for (int col = 0; col < r; ++col) {
      int piv = col;
      double best = std::abs(m[static_cast<std::size_t>(col) * 2 * r + col]);
      for (int i = col + 1; i < r; ++i) {
        const double cand = std::abs(m[static_cast<std::size_t>(i) * 2 * r + col]);
        if (cand > best) { best = cand; piv = i; }
      }
      if (best == 0.0)
        throw std::domain_error("inverse_field: singular matrix at a grid point");
      if (piv != col)
        for (int j = 0; j < 2 * r; ++j)
          std::swap(m[static_cast<std::size_t>(piv) * 2 * r + j],
                    m[static_cast<std::size_t>(col) * 2 * r + j]);
      const cplx d = m[static_cast<std::size_t>(col) * 2 * r + col];
      for (int j = 0; j < 2 * r; ++j) m[static_cast<std::size_t>(col) * 2 * r + j] /= d;
      for (int i = 0; i < r; ++i) {
        if (i == col) continue;
        const cplx f = m[static_cast<std::size_t>(i) * 2 * r + col];
        if (f == cplx{}) continue;
        for (int j = 0; j < 2 * r; ++j)
          m[static_cast<std::size_t>(i) * 2 * r + j] -=
              f * m[static_cast<std::size_t>(col) * 2 * r + j];
      }
    }
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        B.at(p, i, j) = m[static_cast<std::size_t>(i) * 2 * r + r + j];
  }
  return B;
}

// ---------------------------------------------------------------------------
// Spectral operations
// ---------------------------------------------------------------------------

namespace detail {

inline void fft_all_slices(MatrixField& A, bool forward) {
  const std::size_t np = A.npts();
  for (std::size_t e = 0; e < static_cast<std::size_t>(A.r) * A.r; ++e) {
    cplx* s = A.v.data() + e * np;
    if (forward)
      A.geom->plan->forward(s);
    else
      A.geom->plan->backward(s);
  }
  if (!forward) {
    const double inv = 1.0 / static_cast<double>(np);
    for (auto& x : A.v) x *= inv;
  }
}

/// Multiply a spectral slice by (i k_d)^{order} along dimension d.
inline void apply_ik(const TorusGeometry& g, cplx* s, int d, int order) {
  const auto& kv = g.wavenumbers[d];
  const std::size_t stride = g.strides[d];
  const std::size_t Nd = static_cast<std::size_t>(g.dims[d]);
  const std::size_t nblocks = g.npts / (stride * Nd);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t m = 0; m < Nd; ++m) {
      cplx f = cplx(0.0, kv[m]);
      if (order == 2) f = cplx(-kv[m] * kv[m], 0.0);
      cplx* base = s + b * stride * Nd + m * stride;
      for (std::size_t q = 0; q < stride; ++q) base[q] *= f;
    }
}

inline void apply_band_mask(const TorusGeometry& g, cplx* s) {
  for (std::size_t p = 0; p < g.npts; ++p)
    if (!g.in_band(p)) s[p] = cplx{};
}

}  // namespace detail

/// Forward transform of every matrix entry (result holds spectral data).
inline MatrixField spectrum(const MatrixField& A) {
  MatrixField S = A;
  detail::fft_all_slices(S, true);
  return S;
}

inline MatrixField from_spectrum(const MatrixField& S) {
  MatrixField A = S;
  detail::fft_all_slices(A, false);
  return A;
}

/// Exact derivative of the trigonometric interpolant along real direction d.
inline MatrixField derivative(const MatrixField& A, int d) {
  MatrixField S = spectrum(A);
  for (std::size_t e = 0; e < static_cast<std::size_t>(A.r) * A.r; ++e)
    detail::apply_ik(*A.geom, S.v.data() + e * A.npts(), d, 1);
  detail::fft_all_slices(S, false);
  return S;
}

inline MatrixField derivative_from_spectrum(const MatrixField& S, int d,
                                            int order = 1) {
  MatrixField T = S;
  for (std::size_t e = 0; e < static_cast<std::size_t>(S.r) * S.r; ++e)
    detail::apply_ik(*S.geom, T.v.data() + e * S.npts(), d, order);
  detail::fft_all_slices(T, false);
  return T;
}

/// Project onto the 2/3-rule band (truncate high modes).
inline void project_band(MatrixField& A) {
  MatrixField S = spectrum(A);
  for (std::size_t e = 0; e < static_cast<std::size_t>(A.r) * A.r; ++e)
    detail::apply_band_mask(*A.geom, S.v.data() + e * A.npts());
  detail::fft_all_slices(S, false);
  A = std::move(S);
}

inline ScalarField derivative(const ScalarField& f, int d) {
  ScalarField g = f;
  f.geom->plan->forward(g.v.data());
  detail::apply_ik(*f.geom, g.v.data(), d, 1);
  f.geom->plan->backward(g.v.data());
  const double inv = 1.0 / static_cast<double>(f.geom->npts);
  for (auto& x : g.v) x *= inv;
  return g;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

inline cplx integrate(const ScalarField& f) {
  cplx s{};
  for (const auto& x : f.v) s += x;
  return s * f.geom->cell_weight();
}

inline double integrate_real(const std::vector<double>& f, const TorusGeometry& g) {
  double s = 0.0;
  for (double x : f) s += x;
  return s * g.cell_weight();
}

/// integral of tr(A B^*), the unweighted L2 pairing of matrix fields.
inline cplx pair_l2(const MatrixField& A, const MatrixField& B) {
  cplx s{};
  for (std::size_t q = 0; q < A.v.size(); ++q) s += A.v[q] * std::conj(B.v[q]);
  return s * A.geom->cell_weight();
}

/// integral of |A|_F^2 without any form-index weight.
inline double norm_sq_l2(const MatrixField& A) {
  double s = 0.0;
  for (const auto& e : A.v) s += std::norm(e);
  return s * A.geom->cell_weight();
}

}  // namespace ymh
