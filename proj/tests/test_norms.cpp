#include "doctest.h"

#include <cmath>
#include <numbers>

#include "omaxcones/duality.hpp"
#include "omaxcones/errors.hpp"
#include "omaxcones/norms.hpp"
#include "omaxcones/random.hpp"

using namespace omaxcones;

namespace {

double operator_norm(const ComplexMatrix& v) {
  const auto ev = eigvalsh(v.adjoint() * v);
  return ev.empty() ? 0.0 : std::sqrt(std::max(0.0, ev.back()));
}

// Independent numerical-radius oracle: a fine phase grid of lambda_max.
double radius_grid(const ComplexMatrix& v, int points) {
  double best = 0.0;
  for (int k = 0; k < points; ++k) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * k / points);
    const auto h = hermitian_part(w * v);
    best = std::max(best, eigvalsh(h).back());
  }
  return best;
}

ComplexMatrix random_square(Rng& rng, std::size_t n) { return rng.ginibre(n, n); }

// Unital positive map M_n -> M_m in Holevo form: states s_l, POVM P_l.
MatrixMap random_unital_positive(Rng& rng, std::size_t n, std::size_t m, std::size_t q) {
  std::vector<ComplexMatrix> w;
  ComplexMatrix total(m, m);
  for (std::size_t l = 0; l < q; ++l) {
    // The last element is full rank so the sum is invertible.
    w.push_back(rng.wishart(m, l + 1 == q ? m : 1 + rng.index(m)));
    total += w.back();
  }
  const auto sp = eig_hermitian(total);
  ComplexMatrix inv_sqrt(m, m);
  for (std::size_t k = 0; k < m; ++k) inv_sqrt.add_scaled(1.0 / std::sqrt(sp.eigenvalues[k]), ComplexMatrix::outer(sp.eigenvectors.col(k)));
  std::vector<HolevoTerm> terms;
  for (std::size_t l = 0; l < q; ++l)
    terms.push_back({gamma(rng.density(n, 1 + rng.index(n))), hermitian_part(inv_sqrt * w[l] * inv_sqrt)});
  return MatrixMap::from_holevo(n, m, std::move(terms));
}

}  // namespace

TEST_CASE("order_norm: spectral norm of hermitians") {
  ComplexMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -1.0;
  CHECK(order_norm(d).value == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(order_norm(ComplexMatrix::identity(4)).value == doctest::Approx(1.0).epsilon(1e-14));
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto h = rng.hermitian(1 + t % 5);
    const auto ev = eigvalsh(h);
    const auto r = order_norm(h);
    CHECK(r.value == doctest::Approx(std::max(-ev.front(), ev.back())).epsilon(1e-12));
    CHECK(r.method == NormMethod::Spectral);
  }
  CHECK_THROWS_AS(order_norm(ComplexMatrix::unit(2, 2, 0, 1)), Error);
}

TEST_CASE("min_norm: hermitians, scalars and E_12") {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const auto h = rng.hermitian(1 + t % 4);
    CHECK(min_norm(h).value == doctest::Approx(order_norm(h).value).epsilon(1e-10));
  }
  ComplexMatrix s = ComplexMatrix::identity(3);
  s *= cplx(2.0, -1.0);
  CHECK(min_norm(s).value == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

  // Brute force: |conj(x1) x2| over x = (cos a, e^{ib} sin a) depends on a only.
  double oracle = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double a = 0.5 * std::numbers::pi * k / 100000;
    oracle = std::max(oracle, std::cos(a) * std::sin(a));
  }
  const auto r = min_norm(ComplexMatrix::unit(2, 2, 0, 1));
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(std::abs(r.value - 0.5) <= 1e-6);
  CHECK(r.lower <= r.value);
  CHECK(r.value <= r.upper);
  CHECK(r.upper - r.lower <= 1e-6);
  CHECK(r.method == NormMethod::NumericalRadius);
  CHECK(min_norm(ComplexMatrix(3, 3)).value == 0.0);
}

TEST_CASE("min_norm: certified bracket against independent oracles") {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto v = random_square(rng, n);
    const auto r = min_norm(v);
    CHECK(r.upper - r.lower <= 1e-9);
    CHECK(std::abs(r.value - radius_grid(v, 20000)) <= 1e-6 * (1.0 + r.value));
    CHECK(radius_grid(v, 3000) <= r.upper + 1e-12);
    for (int k = 0; k < 50; ++k) {
      const auto x = rng.unit_vector(n);
      CHECK(std::abs(quadratic_form(v, x)) <= r.upper + 1e-12);
    }
  }
}

TEST_CASE("dec_norm: PSD, hermitian and E_12") {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto p = rng.wishart(2 + t % 2, 2);
    CHECK(dec_norm(p).value == doctest::Approx(order_norm(p).value).epsilon(1e-9));
    const auto h = rng.hermitian(2 + t % 2);
    CHECK(dec_norm(h).value == doctest::Approx(order_norm(h).value).epsilon(1e-9));
  }
  const auto e = dec_norm(ComplexMatrix::unit(2, 2, 0, 1));
  CHECK(e.lower >= 0.5 - 1e-12);
  CHECK(e.upper <= 1.0 + 1e-9);
  CHECK(e.upper - e.lower <= 1e-10);
  CHECK(e.undetermined_steps == 0);
  // Regression baseline: the bisection lands on the operator norm.
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.method == NormMethod::Bisection);
}

TEST_CASE("norm chain and agreement with the operator norm in M_2 and M_3") {
  Rng rng(5);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + t % 2;
    const auto v = random_square(rng, n);
    const double m = min_norm(v).value;
    const auto d = dec_norm(v);
    CHECK(m <= d.value + 1e-6);
    CHECK(d.value <= 2.0 * m + 1e-6);
    CHECK(d.value == doctest::Approx(operator_norm(v)).epsilon(1e-8));
  }
}

TEST_CASE("homogeneity and triangle inequality") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 2;
    const auto a = random_square(rng, n), b = random_square(rng, n);
    const cplx c(rng.normal(), rng.normal());
    for (auto norm_of : {+[](const ComplexMatrix& v) { return min_norm(v).value; },
                         +[](const ComplexMatrix& v) { return dec_norm(v).value; }}) {
      CHECK(std::abs(norm_of(c * a) - std::abs(c) * norm_of(a)) <= 1e-8 * (1.0 + std::abs(c) * norm_of(a)));
      CHECK(norm_of(a + b) <= norm_of(a) + norm_of(b) + 1e-8);
    }
  }
}

TEST_CASE("diagonal collapse: min and dec norms equal the largest entry") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 4;
    ComplexMatrix v(n, n);
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v(i, i) = cplx(rng.normal(), rng.normal());
      largest = std::max(largest, std::abs(v(i, i)));
    }
    CHECK(min_norm(v).value == doctest::Approx(largest).epsilon(1e-9));
    const auto d = dec_norm(v);
    CHECK(d.undetermined_steps == 0);
    CHECK(d.value == doctest::Approx(largest).epsilon(1e-9));
  }
}

TEST_CASE("unital positive maps do not increase the decomposition norm") {
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + t % 2, m = 2 + (t / 2) % 3;
    const auto phi = random_unital_positive(rng, n, m, 1 + rng.index(4));
    CHECK(max_abs_diff(phi.apply(ComplexMatrix::identity(n)), ComplexMatrix::identity(m)) < 1e-10);
    const auto v = random_square(rng, n);
    CHECK(operator_norm(phi.apply(v)) <= dec_norm(v).value + 1e-6);
  }
}

TEST_CASE("dec_norm bracket stays sound beyond the PPT-decided sizes") {
  Rng rng(9);
  const auto h = rng.hermitian(4);
  SearchBudget budget;
  budget.iterations = 300;
  const auto d = dec_norm(h, 1e-2, budget);
  const double spectral = order_norm(h).value;
  CHECK(d.lower <= spectral + 1e-9);
  CHECK(spectral <= d.upper + 1e-9);
}
