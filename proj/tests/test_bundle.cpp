#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "test_helpers.hpp"

using namespace ymh;
using namespace ymh::testing;

namespace {

Connection constant_connection_T2(TorusPtr g, double s) {
  // A = s X dx0 + s Y dx1 with X = [[0,1],[-1,0]], Y = [[i,0],[0,-i]]
  Connection A(g, 2);
  A.comp[0] = constant_matrix(g, 2, {{cplx(0, 0), cplx(s, 0)},
                                     {cplx(-s, 0), cplx(0, 0)}});
  A.comp[1] = constant_matrix(g, 2, {{cplx(0, s), cplx(0, 0)},
                                     {cplx(0, 0), cplx(0, -s)}});
  return A;
}

}  // namespace

TEST_CASE("curvature of constant connections", "[bundle]") {
  auto g = make_torus(1, {1.0, 1.0}, {8, 8});

  SECTION("zero connection is flat") {
    Connection A(g, 2);
    auto cur = curvature(A);
    CHECK(l2_sq(cur.F) < 1e-28);
  }

  SECTION("commutator curvature, hand value and FD cross-check") {
    Connection A = constant_connection_T2(g, 1.0);
    auto cur = curvature(A);
    // [X,Y] = [[0,-2i],[-2i,0]]
    MatrixField expect = constant_matrix(g, 2, {{cplx(0, 0), cplx(0, -2)},
                                                {cplx(0, -2), cplx(0, 0)}});
    CHECK(max_abs_diff(cur.F.at(0, 1), expect) < 1e-12);
    CHECK(l2_sq(cur.F) == Catch::Approx(8.0).epsilon(1e-12));

    // brute-force finite-difference curvature: derivatives of constants
    // vanish identically, leaving the pointwise commutator
    MatrixField fd = bracket(A.comp[0], A.comp[1]);
    CHECK(max_abs_diff(cur.F.at(0, 1), fd) < 1e-13);
  }

  SECTION("unitary gauge transform of the flat connection stays flat") {
    // exp() spreads spectra, so keep the generator well inside the band
    auto gf = make_torus(1, {1.0, 1.0}, {32, 32});
    FieldRng rng(21);
    auto gt = random_unitary_gauge(gf, 2, rng, 1, 0.15);
    Connection A(gf, 2);
    HiggsField th(gf, 2);
    auto [Ag, thg] = gauge_apply(gt, A, th);
    for (const auto& c : Ag.comp) CHECK(antihermitian_defect(c) < 1e-12);
    auto cur = curvature(Ag);
    CHECK(std::sqrt(l2_sq(cur.F)) < 1e-10);
  }
}

TEST_CASE("covariant derivative identities", "[bundle]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});
  FieldRng rng(31);
  Connection A = random_connection(g, 2, rng, 2, 0.5);

  SECTION("constants are covariantly closed under the trivial connection") {
    Connection A0(g, 2);
    MatrixField c = constant_matrix(g, 2, {{cplx(1, 0), cplx(0, 2)},
                                           {cplx(0, 0), cplx(-1, 1)}});
    auto d = nabla(A0, c);
    for (const auto& comp : d.comp) CHECK(max_abs(comp) < 1e-13);
  }

  SECTION("dbar of a constant Higgs field under A = 0 vanishes") {
    Connection A0(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    CHECK(l2_sq(delbar(A0, th)) < 1e-28);
  }

  SECTION("Leibniz rule for scalar times section") {
    MatrixField u = random_matrix_field(g, 2, rng, 3, 0.8);
    auto f = fill_entry(g, 1, 0, 0, [](const std::vector<double>& x) {
      return std::cos(2.0 * kPi * x[1]);
    });
    for (int d = 0; d < 2; ++d) {
      MatrixField fu(g, 2);
      const cplx* fs = f.slice(0, 0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const cplx* us = u.slice(i, j);
          cplx* t = fu.slice(i, j);
          for (std::size_t p = 0; p < g->npts; ++p) t[p] = fs[p] * us[p];
        }
      MatrixField lhs = nabla_dir(A, fu, d);
      MatrixField rhs(g, 2);
      MatrixField du = nabla_dir(A, u, d);
      MatrixField df = derivative(f, d);
      const cplx* dfs = df.slice(0, 0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const cplx* us = u.slice(i, j);
          const cplx* dus = du.slice(i, j);
          cplx* t = rhs.slice(i, j);
          for (std::size_t p = 0; p < g->npts; ++p)
            t[p] = dfs[p] * us[p] + fs[p] * dus[p];
        }
      CHECK(max_abs_diff(lhs, rhs) < 1e-10);
    }
  }

  SECTION("metric compatibility integrates to zero") {
    MatrixField u = random_matrix_field(g, 2, rng, 3, 0.7);
    MatrixField w = random_matrix_field(g, 2, rng, 3, 0.7);
    for (int d = 0; d < 2; ++d) {
      const cplx lhs =
          pair_l2(nabla_dir(A, u, d), w) + pair_l2(u, nabla_dir(A, w, d));
      CHECK(std::abs(lhs) < 1e-10);
    }
  }

  SECTION("Bianchi identity") {
    auto cur = curvature(A);
    CHECK(bianchi_residual(A, cur.F) < 1e-10);
  }
}

TEST_CASE("wedge square and theta bracket", "[bundle]") {
  SECTION("n = 1 wedge is identically zero") {
    auto g = make_torus(1, {1.0, 1.0}, {8, 8});
    FieldRng rng(41);
    HiggsField th(g, 2);
    th.comp[0] = random_matrix_field(g, 2, rng, 2, 1.0);
    CHECK(l2_sq(wedge_square(th)) == 0.0);
  }

  SECTION("n = 2 commuting constant components") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    HiggsField th(g, 2);
    th.comp[0] = constant_matrix(g, 2, {{cplx(1, 0), cplx(0, 0)},
                                        {cplx(0, 0), cplx(2, 0)}});
    th.comp[1] = constant_matrix(g, 2, {{cplx(-1, 1), cplx(0, 0)},
                                        {cplx(0, 0), cplx(0, 3)}});
    CHECK(l2_sq(wedge_square(th)) < 1e-28);
  }

  SECTION("n = 2 nilpotent pair, hand value") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    th.comp[1] = unit_matrix_field(g, 2, 1, 0);
    FormTwoZero w = wedge_square(th);
    MatrixField expect = constant_matrix(g, 2, {{cplx(1, 0), cplx(0, 0)},
                                                {cplx(0, 0), cplx(-1, 0)}});
    CHECK(max_abs_diff(w.comp[0], expect) < 1e-14);
    // |theta ^ theta|^2 = 4 |diag(1,-1)|^2 = 8 pointwise
    auto sq = pointwise_sq(w);
    for (double v : sq) REQUIRE(v == Catch::Approx(8.0).margin(1e-12));
  }

  SECTION("diagonal theta has zero bracket") {
    auto g = make_torus(1, {1.0, 1.0}, {8, 8});
    HiggsField th(g, 2);
    th.comp[0] = constant_matrix(g, 2, {{cplx(2, 1), cplx(0, 0)},
                                        {cplx(0, 0), cplx(-1, 3)}});
    CHECK(l2_sq(theta_bracket(th)) < 1e-28);
  }

  SECTION("nilpotent theta bracket, hand value") {
    auto g = make_torus(1, {1.0, 1.0}, {8, 8});
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    FormOneOne tb = theta_bracket(th);
    MatrixField il = lambda_contract(tb);
    MatrixField expect = constant_matrix(g, 2, {{cplx(2, 0), cplx(0, 0)},
                                                {cplx(0, 0), cplx(-2, 0)}});
    CHECK(max_abs_diff(il, expect) < 1e-14);
    CHECK(hermitian_defect(il) < 1e-14);
    CHECK(std::abs(integrate(trace(il))) < 1e-14);
    CHECK(norm_sq_l2(il) == Catch::Approx(8.0).epsilon(1e-12));
  }

  SECTION("Lemma 2.1 pointwise identity for wedge-free theta") {
    // |[theta,theta*]|^2 = |i Lambda [theta,theta*]|^2 when theta ^ theta = 0
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    FieldRng rng(5);
    HiggsField th(g, 2);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i) {
        MatrixField e = random_matrix_field(g, 1, rng, 2, 0.8);
        std::copy(e.slice(0, 0), e.slice(0, 0) + g->npts,
                  th.comp[k].slice(i, i));
      }
    CHECK(l2_sq(wedge_square(th)) < 1e-24);
    FormOneOne tb = theta_bracket(th);
    auto lhs = pointwise_sq(tb);
    auto il = lambda_contract(tb);
    auto rhs = frobenius_sq(il);
    double worst = 0.0;
    for (std::size_t p = 0; p < lhs.size(); ++p)
      worst = std::max(worst, std::abs(lhs[p] - rhs[p]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("gauge action", "[bundle]") {
  auto g = make_torus(1, {1.0, 1.0}, {32, 32});
  FieldRng rng(61);

  SECTION("identity transform is a no-op") {
    Connection A = random_connection(g, 2, rng, 2, 0.4);
    HiggsField th(g, 2);
    th.comp[0] = random_matrix_field(g, 2, rng, 2, 0.5);
    GaugeTransform id{identity_field(g, 2), GaugeTransform::Flavor::unitary};
    auto [Ag, thg] = gauge_apply(id, A, th);
    for (int d = 0; d < 2; ++d)
      CHECK(max_abs_diff(Ag.comp[d], A.comp[d]) < 1e-13);
    CHECK(max_abs_diff(thg.comp[0], th.comp[0]) < 1e-13);
  }

  SECTION("constant unitary conjugation preserves norms") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = random_matrix_field(g, 2, rng, 2, 0.5);
    MatrixField u = constant_matrix(
        g, 2,
        {{cplx(std::cos(0.3), 0), cplx(std::sin(0.3), 0)},
         {cplx(-std::sin(0.3), 0), cplx(std::cos(0.3), 0)}});
    GaugeTransform gu{u, GaugeTransform::Flavor::unitary};
    auto [Ag, thg] = gauge_apply(gu, A, th);
    CHECK(std::sqrt(l2_sq(Ag)) < 1e-12);
    CHECK(l2_sq(thg) == Catch::Approx(l2_sq(th)).epsilon(1e-12));
  }

  SECTION("unitary gauge invariance of curvature and residuals") {
    auto [A, th] = random_higgs_pair(g, 2, 77, 2, 0.8, HiggsModel::diag);
    auto gt = random_unitary_gauge(g, 2, rng, 2, 0.3);
    CHECK(unitary_defect(gt.values) < 1e-12);
    auto [Ag, thg] = gauge_apply(gt, A, th);
    for (const auto& c : Ag.comp) CHECK(antihermitian_defect(c) < 1e-10);
    auto curA = curvature(A);
    auto curG = curvature(Ag);
    CHECK(std::sqrt(l2_sq(curG.F)) ==
          Catch::Approx(std::sqrt(l2_sq(curA.F))).margin(1e-10));
    CHECK(std::sqrt(l2_sq(thg)) ==
          Catch::Approx(std::sqrt(l2_sq(th))).margin(1e-10));
    auto repA = is_higgs_pair(A, th, 1e-6);
    auto repG = is_higgs_pair(Ag, thg, 1e-6);
    CHECK(repG.holomorphicity ==
          Catch::Approx(repA.holomorphicity).margin(1e-10));
    CHECK(repG.wedge == Catch::Approx(repA.wedge).margin(1e-10));
  }

  SECTION("complex gauge orbit preserves the Higgs-pair constraints") {
    // sigma = exp(0.1 sin(2 pi x) e_11), applied to (0, e_12 dz)
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    MatrixField phi = fill_entry(g, 2, 0, 0, [](const std::vector<double>& x) {
      return 0.1 * std::sin(2.0 * kPi * x[0]);
    });
    GaugeTransform sg{exp_field(phi), GaugeTransform::Flavor::complex};
    auto [Ag, thg] = gauge_apply(sg, A, th);
    auto rep = is_higgs_pair(Ag, thg, 1e-8);
    CHECK(rep.holomorphicity < 1e-8);
    CHECK(rep.wedge == 0.0);
    CHECK(rep.pass);
  }

  SECTION("singular transforms are rejected") {
    MatrixField s = identity_field(g, 2);
    s.at(0, 0, 0) = 1e-12;
    GaugeTransform bad{s, GaugeTransform::Flavor::complex};
    Connection A(g, 2);
    HiggsField th(g, 2);
    CHECK_THROWS_AS(gauge_apply(bad, A, th), std::domain_error);
  }
}

TEST_CASE("random higgs pairs", "[bundle]") {
  auto g = make_torus(1, {1.0, 1.0}, {32, 32});

  SECTION("zero amplitude gives the zero pair") {
    auto [A, th] = random_higgs_pair(g, 2, 5, 2, 0.0);
    CHECK(l2_sq(A) == 0.0);
    CHECK(l2_sq(th) == 0.0);
  }

  SECTION("constraints hold at 1e-6 on a 32^2 grid") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      auto [A, th] = random_higgs_pair(g, 2, seed, 2, 0.8, HiggsModel::diag);
      auto rep = is_higgs_pair(A, th, 1e-6);
      INFO("seed " << seed << " holo " << rep.holomorphicity << " wedge "
                   << rep.wedge);
      CHECK(rep.pass);
      for (const auto& c : A.comp) CHECK(antihermitian_defect(c) < 1e-12);
    }
  }

  SECTION("same seed reproduces bit-identical output") {
    auto [A1, t1] = random_higgs_pair(g, 2, 99, 2, 0.7);
    auto [A2, t2] = random_higgs_pair(g, 2, 99, 2, 0.7);
    for (int d = 0; d < 2; ++d)
      CHECK(std::memcmp(A1.comp[d].v.data(), A2.comp[d].v.data(),
                        A1.comp[d].v.size() * sizeof(cplx)) == 0);
    CHECK(std::memcmp(t1.comp[0].v.data(), t2.comp[0].v.data(),
                      t1.comp[0].v.size() * sizeof(cplx)) == 0);
  }

  SECTION("orbit closure holds on refinement (n = 2)") {
    // the 8-per-dim band is only 2 modes wide; keep the gauge factor small
    auto g4 = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    auto g4f = make_torus(2, {1, 1, 1, 1}, {12, 12, 12, 12});
    auto [A, th] = random_higgs_pair(g4, 2, 13, 1, 0.6, HiggsModel::diag, 0.01);
    auto [Af, thf] =
        random_higgs_pair(g4f, 2, 13, 1, 0.6, HiggsModel::diag, 0.01);
    auto rep = is_higgs_pair(A, th, 1e-5);
    auto repf = is_higgs_pair(Af, thf, 1e-5);
    CHECK(rep.pass);
    CHECK(repf.pass);
    // spectral decay: residuals shrink under refinement
    CHECK(repf.holomorphicity <= rep.holomorphicity + 1e-12);
  }
}

TEST_CASE("sobolev norms", "[bundle]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});
  Connection A0(g, 2);

  SECTION("zero field") {
    MatrixField z(g, 2);
    CHECK(sobolev_norm(A0, z, 2, 2.0) == 0.0);
  }

  SECTION("constant scalar, k = 0") {
    MatrixField c = identity_field(g, 1, cplx(3.0, 0.0));
    Connection A1(g, 1);
    CHECK(sobolev_norm(A1, c, 0, 2.0) == Catch::Approx(3.0).epsilon(1e-12));
  }

  SECTION("sine, k = 1, closed form") {
    Connection A1(g, 1);
    MatrixField s = fill_entry(g, 1, 0, 0, [](const std::vector<double>& x) {
      return std::sin(2.0 * kPi * x[0]);
    });
    const double expect = std::sqrt(0.5 + 4.0 * kPi * kPi * 0.5);
    CHECK(sobolev_norm(A1, s, 1, 2.0) == Catch::Approx(expect).margin(1e-10));
  }

  SECTION("k > 2 is rejected") {
    MatrixField z(g, 2);
    CHECK_THROWS_AS(sobolev_norm(A0, z, 3, 2.0), std::invalid_argument);
  }
}
