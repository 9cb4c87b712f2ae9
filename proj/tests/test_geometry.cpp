#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace ymh;
using namespace ymh::testing;

TEST_CASE("make_torus basic invariants", "[geometry]") {
  auto t1 = make_torus(1, {1.0, 1.0}, {16, 16});
  CHECK(t1->volume() == Catch::Approx(1.0).margin(1e-15));
  CHECK(t1->npts == 256);

  auto t2 = make_torus(2, {1.0, 1.0, 1.0, 1.0}, {8, 8, 8, 8});
  CHECK(t2->volume() == Catch::Approx(1.0).margin(1e-15));

  auto t3 = make_torus(1, {2.0 * kPi, 2.0 * kPi}, {32, 32});
  CHECK(t3->volume() == Catch::Approx(4.0 * kPi * kPi).margin(1e-12));

  SECTION("lambda of omega is n") {
    for (auto& g : {t1, t2}) {
      RealTwoForm w = omega_form(g, 2);
      MatrixField c = lambda_contract(w);
      MatrixField expect = identity_field(g, 2, cplx(g->n, 0.0));
      // i * Lambda(omega x Id) = i * n Id; lambda_contract returns i Lambda
      // so compare against i n Id
      scale(expect, cplx(0.0, 1.0));
      CHECK(max_abs_diff(c, expect) < 1e-14);
    }
  }

  SECTION("input validation") {
    CHECK_THROWS_AS(make_torus(3, {1, 1, 1, 1, 1, 1}, {8, 8, 8, 8, 8, 8}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_torus(1, {1, 1}, {15, 16}), std::invalid_argument);
    CHECK_THROWS_AS(make_torus(1, {1, 1}, {6, 8}), std::invalid_argument);
    CHECK_THROWS_AS(make_torus(1, {-1, 1}, {8, 8}), std::invalid_argument);
  }
}

TEST_CASE("spectral derivative", "[geometry]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("derivative of a constant vanishes") {
    MatrixField c = constant_matrix(g, 2, {{cplx(1, 2), cplx(0, 1)},
                                           {cplx(3, 0), cplx(-1, -1)}});
    CHECK(max_abs(derivative(c, 0)) < 1e-13);
    CHECK(max_abs(derivative(c, 1)) < 1e-13);
  }

  SECTION("sine derivative matches the closed form") {
    auto f = fill_entry(g, 1, 0, 0, [](const std::vector<double>& x) {
      return std::sin(2.0 * kPi * x[0]);
    });
    auto expect = fill_entry(g, 1, 0, 0, [](const std::vector<double>& x) {
      return 2.0 * kPi * std::cos(2.0 * kPi * x[0]);
    });
    CHECK(max_abs_diff(derivative(f, 0), expect) < 1e-11);
  }

  SECTION("d of d vanishes on random band-limited data") {
    FieldRng rng(11);
    MatrixField f = random_matrix_field(g, 2, rng, 4, 1.0);
    // antisymmetrized second derivatives: d(df) = 0 exactly
    MatrixField d01 = derivative(derivative(f, 0), 1);
    MatrixField d10 = derivative(derivative(f, 1), 0);
    axpy(d01, -1.0, d10);
    CHECK(std::sqrt(norm_sq_l2(d01)) < 1e-12);
  }

  SECTION("translation equivariance") {
    FieldRng rng(5);
    MatrixField f = random_matrix_field(g, 1, rng, 3, 1.0);
    MatrixField df = derivative(f, 0);
    // shift by one grid cell along x0
    auto shift = [&](const MatrixField& m) {
      MatrixField out = m;
      const std::size_t s0 = g->strides[0];
      const std::size_t N0 = static_cast<std::size_t>(g->dims[0]);
      for (std::size_t p = 0; p < g->npts; ++p) {
        const std::size_t i0 = (p / s0) % N0;
        const std::size_t q = p + ((i0 + 1) % N0 - i0) * s0;
        out.v[q] = m.v[p];
      }
      return out;
    };
    CHECK(max_abs_diff(derivative(shift(f), 0), shift(df)) < 1e-12);
  }
}

TEST_CASE("integration", "[geometry]") {
  auto g = make_torus(1, {1.0, 1.0}, {16, 16});

  SECTION("constant") {
    auto one = fill_scalar(g, [](const std::vector<double>&) { return 1.0; });
    CHECK(integrate(one).real() == Catch::Approx(1.0).margin(1e-14));
  }

  SECTION("mean-zero mode") {
    auto s = fill_scalar(g, [](const std::vector<double>& x) {
      return std::sin(2.0 * kPi * x[0]);
    });
    CHECK(std::abs(integrate(s)) < 1e-14);
  }

  SECTION("sin^2 integrates to one half") {
    auto s = fill_scalar(g, [](const std::vector<double>& x) {
      const double v = std::sin(2.0 * kPi * x[0]);
      return v * v;
    });
    CHECK(integrate(s).real() == Catch::Approx(0.5).margin(1e-12));
  }

  SECTION("integration by parts") {
    FieldRng rng(3);
    MatrixField f = random_matrix_field(g, 1, rng, 4, 1.0);
    MatrixField h = random_matrix_field(g, 1, rng, 4, 1.0);
    // <df, h dx_0> + <f, d* (h dx_0)> = 0 with d*(h dx_0) = -d_0 h
    const cplx lhs = pair_l2(derivative(f, 0), h);
    const cplx rhs = pair_l2(f, derivative(h, 0));
    CHECK(std::abs(lhs + rhs) < 1e-10);
  }
}

TEST_CASE("lambda contraction", "[geometry]") {
  SECTION("F = H dz ^ dzbar on the unit T^2 gives 2H") {
    auto g = make_torus(1, {1.0, 1.0}, {16, 16});
    FieldRng rng(9);
    FormOneOne F(g, 2);
    F.comp[0][0] = random_matrix_field(g, 2, rng, 2, 1.0);
    MatrixField c = lambda_contract(F);
    MatrixField expect = F.comp[0][0];
    scale(expect, 2.0);
    CHECK(max_abs_diff(c, expect) < 1e-13);
  }

  SECTION("zero input gives zero") {
    auto g = make_torus(1, {1.0, 1.0}, {16, 16});
    RealTwoForm F(g, 2);
    CHECK(max_abs(lambda_contract(F)) == 0.0);
  }

  SECTION("lambda is adjoint to wedging with omega") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    FieldRng rng(2);
    RealTwoForm F(g, 2);
    for (auto& c : F.comp) c = random_matrix_field(g, 2, rng, 1, 1.0);
    MatrixField phi = random_matrix_field(g, 2, rng, 1, 1.0);
    // <Lambda F, phi> = <F, phi ^ omega> pointwise; integrate both sides.
    // Lambda F = sum_k F_{2k,2k+1}; phi ^ omega has components phi on the
    // omega planes.
    MatrixField lf(g, 2);
    axpy(lf, 1.0, F.at(0, 1));
    axpy(lf, 1.0, F.at(2, 3));
    const cplx lhs = pair_l2(lf, phi);
    const cplx rhs = pair_l2(F.at(0, 1), phi) + pair_l2(F.at(2, 3), phi);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }

  SECTION("complex/real two-form conversions preserve norms") {
    auto g = make_torus(2, {1, 1, 1, 1}, {8, 8, 8, 8});
    FieldRng rng(4);
    FormOneOne G(g, 2);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        G.comp[j][k] = random_matrix_field(g, 2, rng, 1, 1.0);
    RealTwoForm Fr = to_real(G);
    CHECK(l2_sq(Fr) == Catch::Approx(l2_sq(G)).epsilon(1e-12));
    auto parts = to_complex_parts(Fr);
    CHECK(l2_sq(parts.p20) < 1e-24);
    CHECK(l2_sq(parts.p02) < 1e-24);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        CHECK(max_abs_diff(parts.p11.comp[j][k], G.comp[j][k]) < 1e-13);
  }
}
