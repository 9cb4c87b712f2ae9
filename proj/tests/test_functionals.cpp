#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace ymh;
using namespace ymh::testing;

TEST_CASE("ymh energy values", "[functionals]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("zero pair") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    CHECK(ymh_energy(A, th) == 0.0);
  }

  SECTION("nilpotent constant theta on the unit T^2 gives 8") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    CHECK(ymh_energy(A, th) == Catch::Approx(8.0).epsilon(1e-12));
  }

  SECTION("diagonal constant theta is a minimum") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = constant_matrix(g, 2, {{cplx(1, 2), cplx(0, 0)},
                                        {cplx(0, 0), cplx(-2, 1)}});
    CHECK(ymh_energy(A, th) < 1e-26);
  }

  SECTION("density integrates to the energy") {
    auto [A, th] = random_higgs_pair(g, 2, 3, 2, 0.8);
    auto e = energy_density(A, th);
    for (double v : e) REQUIRE(v >= 0.0);
    CHECK(integrate_real(e, *g) ==
          Catch::Approx(ymh_energy(A, th)).epsilon(1e-12));
  }
}

TEST_CASE("hermitian-einstein residual", "[functionals]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("diagonal constant theta has zero residual") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = constant_matrix(g, 2, {{cplx(1, 0), cplx(0, 0)},
                                        {cplx(0, 0), cplx(0, 1)}});
    auto res = he_residual(A, th);
    CHECK(res.sup < 1e-13);
    CHECK(res.l2 < 1e-13);
  }

  SECTION("nilpotent hand values") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    auto res = he_residual(A, th);
    CHECK(res.sup == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(res.l2 * res.l2 == Catch::Approx(8.0).epsilon(1e-12));
    CHECK(hermitian_defect(res.field) < 1e-12);
  }

  SECTION("unitary conjugation preserves the norms") {
    auto [A, th] = random_higgs_pair(g, 2, 11, 2, 0.7);
    FieldRng rng(8);
    auto gt = random_unitary_gauge(g, 2, rng, 1, 0.2);
    auto [Ag, thg] = gauge_apply(gt, A, th);
    auto r0 = he_residual(A, th);
    auto r1 = he_residual(Ag, thg);
    CHECK(r1.l2 == Catch::Approx(r0.l2).margin(1e-10));
    CHECK(r1.sup == Catch::Approx(r0.sup).margin(1e-10));
  }
}

TEST_CASE("einstein constant vanishes on the trivial bundle", "[functionals]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("zero connection, exactly") {
    Connection A(g, 2);
    CHECK(einstein_constant(A) == 0.0);
  }

  SECTION("random smooth connections") {
    for (std::uint64_t seed : {1ull, 2ull, 9ull}) {
      FieldRng rng(seed);
      Connection A = random_connection(g, 2, rng, 3, 0.6);
      CHECK(std::abs(einstein_constant(A)) < 1e-9);
      // brute-force check: direct summation of tr(i Lambda F)
      auto cur = curvature(A);
      MatrixField il = lambda_contract(cur.F);
      cplx acc{};
      for (int i = 0; i < 2; ++i) {
        const cplx* s = il.slice(i, i);
        for (std::size_t p = 0; p < g->npts; ++p) acc += s[p];
      }
      acc *= g->cell_weight() / (2.0 * g->volume());
      CHECK(std::abs(einstein_constant(A) - acc.real()) < 1e-15);
    }
  }
}

TEST_CASE("chern numbers vanish for trivial periodic data", "[functionals]") {
  SECTION("zero connection") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    Connection A(g, 2);
    auto cn = chern_numbers(A);
    CHECK(cn.c1_integral == 0.0);
    CHECK(cn.c2_combination_integral == 0.0);
  }

  SECTION("constant nonabelian connection on T^4") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    Connection A(g, 2);
    A.comp[0] = constant_matrix(g, 2, {{cplx(0, 0), cplx(1, 0)},
                                       {cplx(-1, 0), cplx(0, 0)}});
    A.comp[1] = constant_matrix(g, 2, {{cplx(0, 1), cplx(0, 0)},
                                       {cplx(0, 0), cplx(0, -1)}});
    A.comp[2] = constant_matrix(g, 2, {{cplx(0, 0), cplx(0, 1)},
                                       {cplx(0, 1), cplx(0, 0)}});
    A.comp[3] = constant_matrix(g, 2, {{cplx(0, 0.5), cplx(0.5, 0)},
                                       {cplx(-0.5, 0), cplx(0, -0.5)}});
    auto cn = chern_numbers(A);
    CHECK(std::abs(cn.c1_integral) < 1e-9);
    CHECK(std::abs(cn.c2_combination_integral) < 1e-9);
  }

  SECTION("random smooth connections on an 8^4 grid") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    for (std::uint64_t seed : {4ull, 5ull}) {
      FieldRng rng(seed);
      Connection A = random_connection(g, 2, rng, 1, 0.4);
      auto cn = chern_numbers(A);
      CHECK(std::abs(cn.c1_integral) < 1e-8);
      CHECK(std::abs(cn.c2_combination_integral) < 1e-8);
    }
  }
}

TEST_CASE("energy identity", "[functionals]") {
  SECTION("n = 1 orbit data") {
    auto g = make_torus(1, {1.0, 1.0}, {32, 32});
    for (std::uint64_t seed : {1ull, 7ull}) {
      auto [A, th] = random_higgs_pair(g, 2, seed, 2, 0.8);
      auto rep = energy_report(A, th);
      CHECK(std::abs(rep.identity_gap) < 1e-8);
      CHECK(rep.residual_term >= 0.0);
      CHECK(rep.ymh >= rep.constant_term + rep.topological_term - 1e-10);
    }
  }

  SECTION("n = 2 exact commuting pair") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    th.comp[1] = unit_matrix_field(g, 2, 0, 1);
    Connection A(g, 2);
    auto rep = energy_report(A, th);
    CHECK(std::abs(rep.identity_gap) < 1e-10);
  }

  SECTION("n = 2 orbit data") {
    auto g = make_torus(2, {1, 1, 1, 1}, {12, 12, 12, 12});
    auto [A, th] = random_higgs_pair(g, 2, 21, 1, 0.6, HiggsModel::diag, 0.02);
    auto rep = energy_report(A, th);
    CHECK(std::abs(rep.identity_gap) < 1e-6);
  }
}

TEST_CASE("parabolic local energy", "[functionals]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("stationary zero trajectory") {
    std::vector<EnergySample> samples{{0.0, std::vector<double>(g->npts, 0.0)},
                                      {1.0, std::vector<double>(g->npts, 0.0)}};
    CHECK(local_parabolic_energy(*g, samples, {0.5, 0.5}, 0.5, 0.25) == 0.0);
  }

  SECTION("stationary nilpotent pair matches the direct sum oracle") {
    Connection A(g, 2);
    HiggsField th(g, 2);
    th.comp[0] = unit_matrix_field(g, 2, 0, 1);
    auto e = energy_density(A, th);
    std::vector<EnergySample> samples{{0.0, e}, {0.5, e}, {1.0, e}};
    const double r = 0.25;
    const double got = local_parabolic_energy(*g, samples, {0.5, 0.5}, 0.5, r);
    // oracle: e is the constant 8, the window has length 2 r^2, and the ball
    // integral is 8 * (#points inside) * cell weight
    std::size_t inside = 0;
    for (std::size_t p = 0; p < g->npts; ++p)
      if (g->periodic_distance(p, {0.5, 0.5}) <= r) ++inside;
    const double oracle =
        2.0 * r * r * 8.0 * static_cast<double>(inside) * g->cell_weight();
    CHECK(got == Catch::Approx(oracle).epsilon(1e-12));
  }

  SECTION("window coverage and radius are validated") {
    std::vector<EnergySample> samples{{0.0, std::vector<double>(g->npts, 0.0)},
                                      {0.1, std::vector<double>(g->npts, 0.0)}};
    CHECK_THROWS_AS(local_parabolic_energy(*g, samples, {0.5, 0.5}, 0.5, 0.25),
                    std::invalid_argument);
    CHECK_THROWS_AS(local_parabolic_energy(*g, samples, {0.5, 0.5}, 0.05, 0.7),
                    std::invalid_argument);
  }
}
