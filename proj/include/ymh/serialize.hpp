#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ymh/flow.hpp"
#include "ymh/spectral.hpp"

namespace ymh {

// ---------------------------------------------------------------------------
// Checkpoint file: magic "YMHF", u32 format version (little-endian), header
// (n: u32, rank: u32, grid dims: 2n x u32, sides: 2n x f64), then the A and
// theta coefficient arrays as interleaved float64 (re, im), grid row-major,
// matrix entries row-major, little-endian. A's 2n direction fields come
// first, then theta's n components.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

inline void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

inline void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

inline double get_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

inline void put_matrix_field(std::ofstream& os, const MatrixField& M) {
  const std::size_t np = M.npts();
  for (std::size_t p = 0; p < np; ++p)
    for (int i = 0; i < M.r; ++i)
      for (int j = 0; j < M.r; ++j) {
        const cplx z = M.at(p, i, j);
        put_f64(os, z.real());
        put_f64(os, z.imag());
      }
}

inline void get_matrix_field(std::ifstream& is, MatrixField& M) {
  const std::size_t np = M.npts();
  for (std::size_t p = 0; p < np; ++p)
    for (int i = 0; i < M.r; ++i)
      for (int j = 0; j < M.r; ++j) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        M.at(p, i, j) = cplx(re, im);
      }
}

}  // namespace detail

inline void write_checkpoint(const std::string& path, const Connection& A,
                             const HiggsField& theta) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path);
  os.write("YMHF", 4);
  detail::put_u32(os, kCheckpointVersion);
  const auto& g = *A.geom;
  detail::put_u32(os, static_cast<std::uint32_t>(g.n));
  detail::put_u32(os, static_cast<std::uint32_t>(A.r));
  for (int d = 0; d < g.real_dim(); ++d)
    detail::put_u32(os, static_cast<std::uint32_t>(g.dims[d]));
  for (int d = 0; d < g.real_dim(); ++d) detail::put_f64(os, g.sides[d]);
  for (const auto& c : A.comp) detail::put_matrix_field(os, c);
  for (const auto& c : theta.comp) detail::put_matrix_field(os, c);
  if (!os) throw std::runtime_error("write_checkpoint: write failed");
}

struct CheckpointData {
  TorusPtr geom;
  Connection A;
  HiggsField theta;
};

inline CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "YMHF", 4) != 0)
    throw std::runtime_error("read_checkpoint: bad magic");
  const std::uint32_t version = detail::get_u32(is);
  if (version != kCheckpointVersion)
    throw std::runtime_error("read_checkpoint: unsupported format version");
  const int n = static_cast<int>(detail::get_u32(is));
  const int rank = static_cast<int>(detail::get_u32(is));
  std::vector<int> grid(2 * n);
  for (auto& d : grid) d = static_cast<int>(detail::get_u32(is));
  std::vector<double> sides(2 * n);
  for (auto& s : sides) s = detail::get_f64(is);
  if (!is) throw std::runtime_error("read_checkpoint: truncated header");

  CheckpointData out{make_torus(n, sides, grid), Connection{}, HiggsField{}};
  out.A = Connection(out.geom, rank);
  out.theta = HiggsField(out.geom, rank);
  for (auto& c : out.A.comp) detail::get_matrix_field(is, c);
  for (auto& c : out.theta.comp) detail::get_matrix_field(is, c);
  if (!is) throw std::runtime_error("read_checkpoint: truncated payload");
  return out;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const DiagnosticsRecord& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["ymh"] = r.ymh;
  j["theta_sup_residual"] = r.theta_sup_residual;
  j["theta_l2_residual"] = r.theta_l2_residual;
  j["dbar_drift"] = r.dbar_drift;
  j["wedge_drift"] = r.wedge_drift;
  j["theta_l2"] = r.theta_l2;
  j["nabla_theta_l2"] = r.nabla_theta_l2;
  if (r.lambda_est.has_value())
    j["lambda_est"] = *r.lambda_est;
  else
    j["lambda_est"] = nullptr;
  j["dt"] = r.dt;
  j["accepted"] = r.accepted;
  return j;
}

inline nlohmann::json to_json(const EnergyReport& r) {
  return nlohmann::json{{"ymh", r.ymh},
                        {"residual_term", r.residual_term},
                        {"constant_term", r.constant_term},
                        {"topological_term", r.topological_term},
                        {"identity_gap", r.identity_gap}};
}

inline nlohmann::json to_json(const WeitzenbockReport& r) {
  return nlohmann::json{{"grad_term", r.grad_term},
                        {"ricci_term", r.ricci_term},
                        {"bracket_term", r.bracket_term},
                        {"rhs_term", r.rhs_term},
                        {"residual", r.residual},
                        {"constraint_warning", r.constraint_warning}};
}

inline nlohmann::json to_json(const EigenResult& r) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& comp : r.v.comp) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t p = 0; p < comp.npts(); ++p)
      for (int i = 0; i < comp.r; ++i)
        for (int j = 0; j < comp.r; ++j) {
          const cplx z = comp.at(p, i, j);
          entries.push_back(nlohmann::json::array({z.real(), z.imag()}));
        }
    v.push_back(std::move(entries));
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [mu, q] : r.penalty_trace)
    trace.push_back(nlohmann::json::array({mu, q}));
  return nlohmann::json{{"lambda_hat", r.lambda_hat},
                        {"v", std::move(v)},
                        {"wedge_feasibility", r.wedge_feasibility},
                        {"penalty_trace", std::move(trace)},
                        {"converged", r.converged},
                        {"iterations", r.iterations}};
}

}  // namespace ymh
