#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ymh/bundle.hpp"

namespace ymh {

/// Deterministic band-limited field generation. Spectral coefficients are
/// drawn for integer wavevectors |m|_inf <= roughness in a fixed iteration
/// order that does not depend on the grid, so the same seed describes the
/// same continuum field at every resolution (modes outside a grid's 2/3 band
/// are dropped). Amplitudes decay like exp(-decay * |m|).
class FieldRng {
 public:
  explicit FieldRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {
    // 53-bit uniform in [0,1); bit-stable across platforms
    return (eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  cplx unit_box() { return cplx(uniform() - 0.5, uniform() - 0.5) * 2.0; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

namespace detail {

/// Enumerate integer wavevectors with |m|_inf <= rough, excluding 0, in a
/// fixed lexicographic order.
inline std::vector<std::vector<int>> mode_list(int dim, int rough) {
  std::vector<std::vector<int>> modes;
  std::vector<int> m(dim, -rough);
  while (true) {
    bool zero = true;
    for (int d = 0; d < dim; ++d) zero = zero && (m[d] == 0);
    if (!zero) modes.push_back(m);
    int d = dim - 1;
    while (d >= 0) {
      if (++m[d] <= rough) break;
      m[d] = -rough;
      --d;
    }
    if (d < 0) break;
  }
  return modes;
}

inline bool mode_fits(const TorusGeometry& g, const std::vector<int>& m) {
  for (int d = 0; d < g.real_dim(); ++d)
    if (std::abs(m[d]) > g.band_limit[d]) return false;
  return true;
}

inline std::size_t mode_to_point(const TorusGeometry& g, const std::vector<int>& m) {
  std::size_t p = 0;
  for (int d = 0; d < g.real_dim(); ++d) {
    int idx = m[d] >= 0 ? m[d] : m[d] + g.dims[d];
    p += static_cast<std::size_t>(idx) * g.strides[d];
  }
  return p;
}

}  // namespace detail

/// Band-limited complex matrix field with decaying random spectrum. The
/// normalization uses only the drawn mode weights, never grid samples, so a
/// given seed describes the same continuum field at every resolution.
inline MatrixField random_matrix_field(TorusPtr g, int r, FieldRng& rng,
                                       int roughness, double amplitude,
                                       double decay = 0.7) {
  MatrixField S(g, r);
  const auto modes = detail::mode_list(g->real_dim(), roughness);
  double weight_sum = 0.0;
  for (const auto& m : modes) {
    double mag = 0.0;
    for (int d = 0; d < g->real_dim(); ++d) mag += static_cast<double>(m[d]) * m[d];
    weight_sum += std::exp(-decay * std::sqrt(mag));
  }
  const double norm = weight_sum > 0.0 ? amplitude / weight_sum : 0.0;
  const double npts = static_cast<double>(g->npts);
  for (const auto& m : modes) {
    double mag = 0.0;
    for (int d = 0; d < g->real_dim(); ++d) mag += static_cast<double>(m[d]) * m[d];
    const double w = std::exp(-decay * std::sqrt(mag)) * norm;
    // Draw coefficients for every matrix entry regardless of grid so the
    // continuum field is seed-determined.
    std::vector<cplx> entries(static_cast<std::size_t>(r) * r);
    for (auto& e : entries) e = rng.unit_box() * w;
    if (!detail::mode_fits(*g, m)) continue;
    const std::size_t p = detail::mode_to_point(*g, m);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        S.at(p, i, j) = entries[static_cast<std::size_t>(i) * r + j] * npts;
  }
  return from_spectrum(S);
}

/// Pointwise anti-Hermitian band-limited random field.
inline MatrixField random_antihermitian_field(TorusPtr g, int r, FieldRng& rng,
                                              int roughness, double amplitude,
                                              double decay = 0.7) {
  MatrixField X = random_matrix_field(g, r, rng, roughness, amplitude, decay);
  MatrixField Xh = adjoint(X);
  axpy(X, -1.0, Xh);
  scale(X, 0.5);
  return X;
}

/// Random smooth unitary connection (anti-Hermitian coefficient fields).
inline Connection random_connection(TorusPtr g, int r, FieldRng& rng,
                                    int roughness, double amplitude,
                                    double decay = 0.7) {
  Connection A(g, r);
  for (int d = 0; d < g->real_dim(); ++d)
    A.comp[d] = random_antihermitian_field(g, r, rng, roughness, amplitude, decay);
  return A;
}

inline GaugeTransform random_unitary_gauge(TorusPtr g, int r, FieldRng& rng,
                                           int roughness, double amplitude,
                                           double decay = 0.7) {
  MatrixField X = random_antihermitian_field(g, r, rng, roughness, amplitude, decay);
  return GaugeTransform{exp_field(X), GaugeTransform::Flavor::unitary};
}

inline GaugeTransform random_complex_gauge(TorusPtr g, int r, FieldRng& rng,
                                           int roughness, double amplitude,
                                           double decay = 0.7) {
  MatrixField X = random_matrix_field(g, r, rng, roughness, amplitude, decay);
  return GaugeTransform{exp_field(X), GaugeTransform::Flavor::complex};
}

/// Model Higgs pairs pushed through a random complex gauge transform.
///
/// The model is A = 0 with constant commuting (diagonal) theta components,
/// which satisfies both Higgs-pair constraints exactly; the complex gauge
/// action preserves them in the continuum, so the constraint residuals of the
/// output measure spectral truncation only. `model` selects the matrix model:
///   diag      well-separated diagonal entries (polystable data)
///   nilpotent strictly upper-triangular shift (semistable, grading kills it)
///   mixed     diagonal plus nilpotent part sharing eigenvalues
enum class HiggsModel { diag, nilpotent, mixed };

inline std::pair<Connection, HiggsField> random_higgs_pair(
    TorusPtr g, int rank, std::uint64_t seed, int roughness, double amplitude,
    HiggsModel model = HiggsModel::diag, double gauge_amplitude = -1.0) {
  FieldRng rng(seed);
  Connection A0(g, rank);
  HiggsField t0(g, rank);
  if (amplitude > 0.0) {
    for (int k = 0; k < g->n; ++k) {
      for (int i = 0; i < rank; ++i) {
        // spread base points around the unit circle plus a small jitter
        const double phi =
            2.0 * std::numbers::pi * (static_cast<double>(i) + 0.25 * (k + 1)) / rank;
        cplx base = cplx(std::cos(phi), std::sin(phi));
        cplx jit = 0.2 * rng.unit_box();
        cplx val = amplitude * (base + jit);
        if (model == HiggsModel::nilpotent) val = 0.0;
        cplx* s = t0.comp[k].slice(i, i);
        std::fill(s, s + g->npts, val);
      }
      if (model != HiggsModel::diag) {
        for (int i = 0; i + 1 < rank; ++i) {
          cplx* s = t0.comp[k].slice(i, i + 1);
          std::fill(s, s + g->npts, cplx(amplitude, 0.0));
        }
      }
      if (model == HiggsModel::mixed) {
        // equal diagonal so the nilpotent part commutes with it
        for (int i = 0; i < rank; ++i) {
          cplx* s = t0.comp[k].slice(i, i);
          std::fill(s, s + g->npts, cplx(0.5 * amplitude, 0.25 * amplitude));
        }
      }
    }
  }
  double ga = gauge_amplitude >= 0.0 ? gauge_amplitude
                                     : 0.35 * std::min(amplitude, 1.0);
  if (ga == 0.0 || amplitude == 0.0) return {std::move(A0), std::move(t0)};
  GaugeTransform sg = random_complex_gauge(g, rank, rng, roughness, ga);
  auto [A, theta] = gauge_apply(sg, A0, t0);
  for (auto& c : A.comp) project_band(c);
  for (auto& c : theta.comp) project_band(c);
  return {std::move(A), std::move(theta)};
}

}  // namespace ymh
