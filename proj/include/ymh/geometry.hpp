#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymh/fft.hpp"

namespace ymh {

/// Flat Kaehler torus of complex dimension n in {1,2}.
///
/// Real coordinates x_0..x_{2n-1} with periods sides[d] and uniform periodic
/// grids dims[d]. The complex structure is the standard one,
/// z_k = x_{2k} + i x_{2k+1}, the metric is the flat Euclidean one (the
/// periods carry all geometry), and the Kaehler form is
/// omega = sum_k dx_{2k} ^ dx_{2k+1}. All calculus is pseudo-spectral:
/// derivatives act exactly on the trigonometric interpolant, and products of
/// band-limited data are exact at grid points. band_limit[d] = floor(N_d/3)
/// is the per-dimension 2/3-rule band used to project nonlinear terms.
struct TorusGeometry {
  int n = 1;                      // complex dimension
  std::vector<double> sides;      // 2n real periods
  std::vector<int> dims;          // 2n grid sizes, even, >= 8
  std::size_t npts = 0;           // product of dims
  std::vector<std::vector<double>> wavenumbers;  // signed k per dim; Nyquist -> 0
  std::vector<int> band_limit;    // floor(N/3) per dim
  std::vector<std::size_t> strides;  // row-major, last dim fastest
  std::shared_ptr<FftPlan> plan;

  int real_dim() const { return 2 * n; }

  double volume() const {
    double v = 1.0;
    for (double s : sides) v *= s;
    return v;
  }

  /// Quadrature weight of one grid cell; the periodic rectangle rule is
  /// exact for band-limited integrands.
  double cell_weight() const { return volume() / static_cast<double>(npts); }

  /// Coordinates of grid point p.
  std::vector<double> coords(std::size_t p) const {
    std::vector<double> x(real_dim());
    for (int d = 0; d < real_dim(); ++d) {
      const std::size_t idx = (p / strides[d]) % static_cast<std::size_t>(dims[d]);
      x[d] = sides[d] * static_cast<double>(idx) / static_cast<double>(dims[d]);
    }
    return x;
  }

  /// Periodic (flat torus) distance between a grid point and a center.
  double periodic_distance(std::size_t p, const std::vector<double>& center) const {
    const auto x = coords(p);
    double d2 = 0.0;
    for (int d = 0; d < real_dim(); ++d) {
      double dd = std::fmod(std::abs(x[d] - center[d]), sides[d]);
      dd = std::min(dd, sides[d] - dd);
      d2 += dd * dd;
    }
    return std::sqrt(d2);
  }

  /// Integer mode index (signed) of grid index m along dimension d.
  int mode_of(int m, int d) const {
    return (m <= dims[d] / 2) ? m : m - dims[d];
  }

  bool in_band(std::size_t p_spectral) const {
    for (int d = 0; d < real_dim(); ++d) {
      const int m = static_cast<int>((p_spectral / strides[d]) %
                                     static_cast<std::size_t>(dims[d]));
      if (std::abs(mode_of(m, d)) > band_limit[d]) return false;
    }
    return true;
  }

  double shortest_period() const {
    double s = sides[0];
    for (double v : sides) s = std::min(s, v);
    return s;
  }
};

using TorusPtr = std::shared_ptr<const TorusGeometry>;

inline TorusPtr make_torus(int n, const std::vector<double>& sides,
                           const std::vector<int>& grid) {
  if (n != 1 && n != 2)
    throw std::invalid_argument("make_torus: complex dimension must be 1 or 2");
  if (sides.size() != static_cast<std::size_t>(2 * n) ||
      grid.size() != static_cast<std::size_t>(2 * n))
    throw std::invalid_argument("make_torus: need 2n sides and 2n grid sizes");
  for (double s : sides)
    if (!(s > 0.0)) throw std::invalid_argument("make_torus: sides must be positive");
  for (int g : grid) {
    if (g < 8) throw std::invalid_argument("make_torus: grid sizes must be >= 8");
    if (g % 2 != 0) throw std::invalid_argument("make_torus: grid sizes must be even");
  }

  auto geom = std::make_shared<TorusGeometry>();
  geom->n = n;
  geom->sides = sides;
  geom->dims = grid;
  geom->npts = 1;
  for (int g : grid) geom->npts *= static_cast<std::size_t>(g);

  geom->strides.assign(2 * n, 1);
  for (int d = 2 * n - 2; d >= 0; --d)
    geom->strides[d] = geom->strides[d + 1] * static_cast<std::size_t>(grid[d + 1]);

  geom->wavenumbers.resize(2 * n);
  geom->band_limit.resize(2 * n);
  for (int d = 0; d < 2 * n; ++d) {
    const int N = grid[d];
    geom->band_limit[d] = N / 3;
    geom->wavenumbers[d].resize(N);
    for (int m = 0; m < N; ++m) {
      int mode = (m <= N / 2) ? m : m - N;
      if (m == N / 2) mode = 0;  // Nyquist derivative is ill-defined; zero it
      geom->wavenumbers[d][m] = 2.0 * std::numbers::pi * mode / sides[d];
    }
  }
  geom->plan = std::make_shared<FftPlan>(grid);
  return geom;
}

inline void check_same_geometry(const TorusPtr& a, const TorusPtr& b,
                                const char* where) {
  if (a.get() != b.get())
    throw std::invalid_argument(std::string(where) +
                                ": fields live on different geometries");
}

}  // namespace ymh
