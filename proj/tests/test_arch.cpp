#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "omaxcones/arch.hpp"
#include "omaxcones/errors.hpp"
#include "omaxcones/random.hpp"

using namespace omaxcones;

namespace {

double norm2(const RealVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Polyhedral cone in R^3 generated by four vectors around the (0,0,1) axis.
GeneratedCone square_cone() {
  GeneratedCone c;
  c.dim = 3;
  c.generators = {{1, 0, 1}, {-1, 0, 1}, {0, 1, 1}, {0, -1, 1}};
  c.unit = {0, 0, 1};
  return c;
}

GeneratedCone ray_cone() {
  GeneratedCone c;
  c.dim = 1;
  c.generators = {{1.0}};
  c.unit = {1.0};
  return c;
}

}  // namespace

TEST_CASE("hermitian coordinates are an isometry") {
  Rng rng(1);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto h = rng.hermitian(n);
    const auto c = hermitian_coords(h);
    CHECK(c.size() == n * n);
    CHECK(max_abs_diff(from_hermitian_coords(c, n), h) < 1e-14);
    CHECK(norm2(c) == doctest::Approx(h.frobenius_norm()).epsilon(1e-12));
  }
  CHECK(spanning_pure_states(2).size() == 6);
  CHECK_THROWS_AS(from_hermitian_coords(RealVector(3), 2), Error);
}

TEST_CASE("builtin cones and presentation checks") {
  const auto lex = builtin_cone("lexicographic2");
  CHECK(lex.oracle(RealVector{-5.0, 1e-9}));
  CHECK_FALSE(cone_contains(lex, RealVector{-5.0, 0.0}));
  CHECK(cone_contains(lex, RealVector{5.0, 0.0}));
  CHECK(is_pointed(lex));
  CHECK(order_unit_check(lex, 20, 1));
  const auto psd = builtin_cone("psd2");
  CHECK(psd.dim == 4);
  CHECK(is_pointed(psd));
  CHECK(order_unit_check(psd, 20, 2));
  CHECK(is_pointed(square_cone()));
  CHECK(order_unit_check(square_cone(), 20, 3));
  GeneratedCone plane;
  plane.dim = 2;
  plane.generators = {{1, 0}, {-1, 0}, {0, 1}};
  plane.unit = {0, 1};
  CHECK_FALSE(is_pointed(plane));
  CHECK_THROWS_AS(builtin_cone("nope"), Error);
}

TEST_CASE("compute_states: ray, square cone and PSD") {
  const auto ray = compute_states(ray_cone());
  REQUIRE(ray.size() == 1);
  CHECK(ray[0][0] == doctest::Approx(1.0).epsilon(1e-12));

  // States of the square cone: s3 = 1, |s1|, |s2| <= 1.
  const auto sq = compute_states(square_cone(), 0, 4);
  for (const auto& s : sq) {
    CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::max(std::abs(s[0]), std::abs(s[1])) <= 1.0 + 1e-12);
  }

  const auto psd = psd_cone(2, false);
  for (const auto& s : compute_states(psd, 64, 5)) {
    const auto rho = from_hermitian_coords(s, 2);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    // Polyhedral outer approximation of the Bloch ball.
    CHECK(eigvalsh(rho).front() >= -0.02);
  }

  GeneratedCone empty;
  empty.dim = 1;
  empty.generators = {{-1.0}};
  empty.unit = {1.0};
  CHECK_THROWS_AS(compute_states(empty), Error);
}

TEST_CASE("lexicographic cone: unique state and N = span{(1,0)}") {
  const auto lex = lexicographic_cone();
  for (const auto& s : compute_states(lex, 0, 1)) {
    CHECK(std::abs(s[0]) < 1e-9);
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto n = compute_N(lex);
  REQUIRE(n.size() == 1);
  CHECK(std::abs(std::abs(n[0][0]) - 1.0) < 1e-12);
  CHECK(std::abs(n[0][1]) < 1e-12);

  const auto level2 = check_level(lex, n, 2, 0);
  CHECK(level2.null_dim == 4);
  CHECK(level2.expected_dim == 4);
  CHECK(level2.ok);
}

TEST_CASE("arch_closure_test examples") {
  const auto lex = lexicographic_cone();
  CHECK(arch_closure_test(RealVector{-5.0, 0.0}, lex).passed);
  CHECK(arch_closure_test(RealVector{3.0, 1.0}, lex).passed);
  CHECK_FALSE(arch_closure_test(RealVector{0.0, -1e-3}, lex).passed);

  const auto psd = builtin_cone("psd2");
  ComplexMatrix a = ComplexMatrix::identity(2);
  a(1, 1) = -0.1;
  const auto t = arch_closure_test(hermitian_coords(a), psd);
  CHECK_FALSE(t.passed);
  REQUIRE(t.first_failure);
  CHECK(*t.first_failure < 0.1);
  CHECK(*t.first_failure >= 0.05);
  CHECK(arch_closure_test(hermitian_coords(ComplexMatrix::identity(2)), psd).passed);

  const std::vector<double> coarse{1.0, 0.5};
  CHECK(arch_closure_test(hermitian_coords(a), psd, coarse).passed);
}

TEST_CASE("arch_closure_test is monotone along the unit") {
  Rng rng(7);
  const auto psd = builtin_cone("psd2");
  const auto lex = lexicographic_cone();
  for (int trial = 0; trial < 40; ++trial) {
    const auto& c = trial % 2 ? psd : lex;
    RealVector a(c.dim);
    for (auto& x : a) x = rng.normal();
    const bool base = arch_closure_test(a, c).passed;
    for (double t : {0.1, 1.0, 3.0}) {
      RealVector b(a);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += t * c.unit[i];
      if (base) CHECK(arch_closure_test(b, c).passed);
    }
  }
}

TEST_CASE("archimedeanize: lexicographic quotient is (R, R+, 1)") {
  const auto r = archimedeanize(lexicographic_cone());
  REQUIRE(r.quotient_dim == 1);
  REQUIRE(r.n_basis.size() == 1);
  CHECK(r.max_state_on_n <= 1e-9);
  CHECK(std::abs(r.quotient_unit[0]) == doctest::Approx(1.0).epsilon(1e-12));
  const double sign = r.quotient_unit[0] > 0 ? 1.0 : -1.0;
  const auto& q = r.quotient_cone;
  CHECK(q.oracle(RealVector{sign * 2.0}));
  CHECK(q.oracle(RealVector{0.0}));
  CHECK_FALSE(q.oracle(RealVector{-sign * 1e-3}));
  // The class of (-5, 0) is zero, hence positive.
  CHECK(q.oracle(r.project(RealVector{-5.0, 0.0})));
  CHECK(r.universal_deviation < 1e-9);
  for (const auto& l : r.levels) CHECK_MESSAGE(l.ok, "level " << l.level);
}

TEST_CASE("archimedeanize: PSD cone is a fixed point") {
  const auto psd = builtin_cone("psd2");
  const auto r = archimedeanize(psd);
  CHECK(r.n_basis.empty());
  REQUIRE(r.quotient_dim == 4);
  CHECK(r.universal_deviation < 1e-9);
  for (const auto& l : r.levels) CHECK(l.ok);
  Rng rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    auto h = rng.hermitian(2);
    if (trial % 3 == 0) h = rng.wishart(2, 1);
    const auto x = hermitian_coords(h);
    CHECK(r.quotient_cone.oracle(r.project(x)) == cone_contains(psd, x));
    CHECK(max_abs_diff(from_hermitian_coords(r.lift(r.project(x)), 2), h) < 1e-12);
  }
}

TEST_CASE("archimedeanize: finitely generated cones are unchanged") {
  const auto c = square_cone();
  const auto r = archimedeanize(c, 3);
  CHECK(r.n_basis.empty());
  REQUIRE(r.quotient_dim == 3);
  CHECK(r.universal_deviation < 1e-9);
  Rng rng(9);
  int inside = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RealVector x{rng.normal(), rng.normal(), rng.normal()};
    const bool member = cone_contains(c, x);
    inside += member;
    CHECK(r.quotient_cone.oracle(r.project(x)) == member);
  }
  CHECK(inside > 0);
  CHECK(inside < 100);
}

TEST_CASE("archimedeanize: a cone with a lineality direction collapses it") {
  // Generators (1,0,0), (-1,0,0), (0,1,1), (0,-1,1) with unit (0,0,1): every state kills (1,0,0).
  GeneratedCone c;
  c.dim = 3;
  c.generators = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 1}, {0, -1, 1}};
  c.unit = {0, 0, 1};
  const auto r = archimedeanize(c, 2);
  REQUIRE(r.n_basis.size() == 1);
  CHECK(std::abs(std::abs(r.n_basis[0][0]) - 1.0) < 1e-12);
  CHECK(r.quotient_dim == 2);
  CHECK(r.max_state_on_n <= 1e-9);
  CHECK(r.universal_deviation < 1e-9);
  for (const auto& l : r.levels) {
    CHECK(l.null_dim == l.level * l.level);
    CHECK(l.ok);
  }
}

TEST_CASE("quotient unit is Archimedean on random classes") {
  const auto r = archimedeanize(lexicographic_cone());
  const auto& q = r.quotient_cone;
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const RealVector y{rng.normal()};
    // Stabilization: membership of y + r u for the whole schedule decides y.
    const bool closed = arch_closure_test(y, q).passed;
    CHECK(closed == q.oracle(y));
  }
}
