#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "omaxcones/cones.hpp"
#include "omaxcones/random.hpp"

using namespace omaxcones;
using namespace omaxcones::testing;

namespace {

std::size_t numeric_rank(const ComplexMatrix& h) {
  const auto ev = eigvalsh(h);
  const double top = std::max(std::abs(ev.front()), std::abs(ev.back()));
  std::size_t r = 0;
  for (double v : ev) r += std::abs(v) > 1e-9 * top;
  return r;
}

// Random hermitian block element with a mix of separable, entangled and indefinite cases.
BlockElement random_element(Rng& rng, std::size_t n, std::size_t m, int kind) {
  switch (kind % 3) {
    case 0: return BlockElement(n, m, rng.wishart(n * m, 1 + rng.index(n * m)));
    case 1: return BlockElement(n, m, rng.hermitian(n * m));
    default: {
      auto a = rng.wishart(n * m, n * m);
      a.add_scaled(0.3, rng.hermitian(n * m));
      return BlockElement(n, m, hermitian_part(a));
    }
  }
}

}  // namespace

TEST_CASE("min_cone_test: swap, negative corner and maximally entangled") {
  const BlockElement swap(2, 2, swap_operator(2));
  auto v = min_cone_test(swap);
  CHECK(v.status == ConeStatus::Member);
  REQUIRE(std::holds_alternative<DecomposableCertificate>(v.certificate));
  CHECK(verify_min_verdict(swap, v).ok);

  BlockElement corner(2, 2);
  corner.flat()(0, 0) = -1.0;
  v = min_cone_test(corner);
  CHECK(v.status == ConeStatus::NotMember);
  const auto& w = std::get<ProductWitness>(v.certificate);
  CHECK(w.value == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(std::abs(w.x[0]) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(w.y[0]) - 1.0) < 1e-12);
  CHECK(verify_min_verdict(corner, v).ok);

  const BlockElement me(2, 2, max_entangled(2));
  v = min_cone_test(me);
  CHECK(v.status == ConeStatus::Member);
  CHECK(std::holds_alternative<PsdCertificate>(v.certificate));
}

TEST_CASE("min_cone_test: rejects non-hermitian input") {
  BlockElement a(2, 2);
  a.flat()(0, 1) = 1.0;
  CHECK_THROWS_AS(min_cone_test(a), Error);
  CHECK_THROWS_AS(max_cone_test(a), Error);
}

TEST_CASE("max_cone_test: identity, maximally entangled and a random separable sample") {
  const BlockElement id(3, 2, ComplexMatrix::identity(6));
  auto v = max_cone_test(id);
  CHECK(v.status == ConeStatus::Member);
  const auto& dec = std::get<SeparableDecomposition>(v.certificate);
  CHECK(relative_frobenius_error(dec.resum(3, 2).flat(), id.flat()) < 1e-12);

  const BlockElement me(2, 2, max_entangled(2));
  v = max_cone_test(me);
  CHECK(v.status == ConeStatus::NotMember);
  const auto& ppt = std::get<PptViolation>(v.certificate);
  CHECK(ppt.eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(verify_max_verdict(me, v).ok);

  const auto sample = sample_dmax(3, 3, 5, 42);
  v = max_cone_test(sample.element);
  CHECK(v.status == ConeStatus::Member);
  const auto& found = std::get<SeparableDecomposition>(v.certificate);
  CHECK(relative_frobenius_error(found.resum(3, 3).flat(), sample.element.flat()) <= 1e-8);
  CHECK(verify_max_verdict(sample.element, v).ok);
}

TEST_CASE("max_cone_test: non-PSD input gives a witness functional") {
  BlockElement a(2, 2, ComplexMatrix::identity(4));
  a.flat()(3, 3) = -0.5;
  const auto v = max_cone_test(a);
  CHECK(v.status == ConeStatus::NotMember);
  const auto& w = std::get<WitnessFunctional>(v.certificate);
  CHECK(w.value == doctest::Approx(-0.5).epsilon(1e-12));
  // The witness matrix is PSD, hence block-positive.
  CHECK(is_psd(w.matrix(2, 2).flat()).psd);
  CHECK(verify_max_verdict(a, v).ok);
}

TEST_CASE("max_cone_test: PPT sufficiency tag in small dimensions") {
  SearchBudget budget;
  budget.prefer_sufficiency = true;
  const BlockElement w(2, 2, werner(0.25));
  const auto v = max_cone_test(w, budget);
  CHECK(v.status == ConeStatus::Member);
  CHECK(v.ppt_sufficient);
  CHECK(std::holds_alternative<SufficiencyTag>(v.certificate));
  CHECK(verify_max_verdict(w, v).ok);
  CHECK_FALSE(max_cone_test(BlockElement(3, 3, ComplexMatrix::identity(9))).ppt_sufficient);
}

TEST_CASE("decompose_separable: product, normalized identity and Werner state") {
  Rng rng(5);
  const auto x = rng.unit_vector(3);
  const auto y = rng.unit_vector(2);
  const BlockElement prod(3, 2, kron(ComplexMatrix::outer(x), ComplexMatrix::outer(y)));
  auto r = decompose_separable(prod);
  CHECK(r.found);
  CHECK(r.decomposition.terms.size() == 1);
  CHECK(r.residual < 1e-14);

  ComplexMatrix quarter = ComplexMatrix::identity(4);
  quarter *= 0.25;
  r = decompose_separable(BlockElement(2, 2, quarter));
  CHECK(r.found);
  CHECK(r.decomposition.terms.size() <= 6);
  CHECK(r.residual < 1e-10);

  // PT of the normalized maximally entangled projector is swap/2 with
  // eigenvalues +-1/2, so the PPT eigenvalue is (1 - 3p)/4.
  const BlockElement w(2, 2, werner(0.25));
  CHECK(eigvalsh(partial_transpose(w).flat()).front() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  r = decompose_separable(w);
  CHECK(r.found);
  CHECK(r.residual <= 1e-8);
  for (const auto& t : r.decomposition.terms) {
    CHECK(is_psd(t.a).psd);
    CHECK(is_psd(t.v).psd);
  }
}

TEST_CASE("decompose_separable: rejects non-PSD input") {
  CHECK_THROWS_AS(decompose_separable(BlockElement(2, 2, swap_operator(2))), Error);
  try {
    decompose_separable(BlockElement(2, 2, swap_operator(2)));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPSD);
  }
}

TEST_CASE("sample_dmax: determinism, single term rank and self-consistency") {
  const auto a = sample_dmax(3, 2, 4, 9);
  const auto b = sample_dmax(3, 2, 4, 9);
  CHECK(a.element.flat() == b.element.flat());
  CHECK(sample_dmax(3, 2, 4, 10).element.flat() != a.element.flat());

  const auto one = sample_dmax(2, 3, 1, 0);
  REQUIRE(one.decomposition.terms.size() == 1);
  const auto& t = one.decomposition.terms.front();
  CHECK(numeric_rank(one.element.flat()) == numeric_rank(t.a) * numeric_rank(t.v));

  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto s = sample_dmax(2 + seed % 2, 2 + (seed / 2) % 2, 1 + seed, seed);
    CHECK(max_cone_test(s.element).status == ConeStatus::Member);
  }
  CHECK_THROWS_AS(sample_dmax(2, 2, 0, 1), Error);
}

TEST_CASE("maximize_product: deterministic and value matches the vectors") {
  Rng rng(3);
  const BlockElement d(3, 3, rng.hermitian(9));
  const auto a = maximize_product(d, 16, 7);
  const auto b = maximize_product(d, 16, 7);
  CHECK(a.value == b.value);
  CHECK(a.x == b.x);
  CHECK(std::abs(d.product_value(a.x, a.y).real() - a.value) < 1e-12);
  CHECK(a.restarts_used == 16);
  // Upper bound by the largest eigenvalue, lower bound by any product vector.
  CHECK(a.value <= eigvalsh(d.flat()).back() + 1e-12);
  CHECK(a.value >= d.product_value(rng.unit_vector(3), rng.unit_vector(3)).real() - 1e-12);
}

TEST_CASE("soundness: every emitted certificate re-verifies") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 2, m = 2 + (trial / 2) % 2;
    const auto a = random_element(rng, n, m, trial);
    const auto vmin = min_cone_test(a);
    const auto vmax = max_cone_test(a);
    const auto cmin = verify_min_verdict(a, vmin);
    const auto cmax = verify_max_verdict(a, vmax);
    CHECK_MESSAGE(cmin.ok, cmin.detail);
    CHECK_MESSAGE(cmax.ok, cmax.detail);
    if (vmax.status == ConeStatus::NotMember)
      if (const auto* p = std::get_if<PptViolation>(&vmax.certificate)) {
        const double value = quadratic_form(partial_transpose(a).flat(), p->eigenvector).real();
        CHECK(std::abs(value - p->eigenvalue) <= 1e-10);
      }
  }
}

TEST_CASE("containment: certified separable elements are block-positive") {
  Rng rng(23);
  int certified = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 3, m = 1 + (trial / 3) % 3;
    BlockElement a = trial % 2 == 0 ? sample_dmax(n, m, 1 + trial % 6, trial).element
                                    : BlockElement(n, m, rng.wishart(n * m, 1 + rng.index(n * m)));
    const auto vmax = max_cone_test(a);
    if (vmax.status != ConeStatus::Member) continue;
    ++certified;
    CHECK(min_cone_test(a).status != ConeStatus::NotMember);
  }
  CHECK(certified >= 250);
}

TEST_CASE("alpha diag form: round trip and membership") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = sample_dmax(3, 2, 3, seed);
    const auto form = to_alpha_diag(s.decomposition, 3);
    CHECK(form.alpha.rows() == 3);
    CHECK(form.alpha.cols() == form.v.size());
    CHECK(relative_frobenius_error(from_alpha_diag(form).flat(), s.element.flat()) < 1e-12);
  }
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    AlphaDiagForm form;
    form.alpha = rng.ginibre(2, 3);
    for (int k = 0; k < 3; ++k) form.v.push_back(rng.wishart(3, 2));
    const auto a = from_alpha_diag(form);
    const auto v = max_cone_test(a);
    CHECK(v.status == ConeStatus::Member);
    CHECK(verify_max_verdict(a, v).ok);
  }
}

TEST_CASE("diagonal collapse: min and max cone agree with the pointwise test") {
  Rng rng(31);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + trial % 4, m = 1 + (trial / 4) % 4;
    BlockElement a(n, m);
    bool pointwise = true;
    for (std::size_t t = 0; t < m; ++t) {
      auto slot = (trial + t) % 3 == 0 ? rng.hermitian(n) : rng.wishart(n, n);
      pointwise = pointwise && is_psd(slot).psd;
      a.flat() += kron(slot, ComplexMatrix::unit(m, m, t, t));
    }
    const bool in_min = min_cone_test(a).status == ConeStatus::Member;
    const bool in_max = max_cone_test(a).status == ConeStatus::Member;
    CHECK(in_min == pointwise);
    CHECK(in_max == pointwise);
  }
}

TEST_CASE("order unit bound: 4rs e - a (x) v is separable") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2, m = 2 + (trial / 2) % 2;
    const auto a = rng.hermitian(n);
    const auto v = rng.hermitian(m);
    const auto ea = eigvalsh(a), ev = eigvalsh(v);
    const double r = std::max(std::abs(ea.front()), std::abs(ea.back()));
    const double s = std::max(std::abs(ev.front()), std::abs(ev.back()));
    BlockElement e(n, m, ComplexMatrix::identity(n * m));
    e.flat() *= 4.0 * r * s;
    e.flat() -= kron(a, v);
    const auto verdict = max_cone_test(e);
    CHECK(verdict.status == ConeStatus::Member);
    CHECK(verify_max_verdict(e, verdict).ok);
  }
}

TEST_CASE("min_cone_test: decomposable samples are never rejected") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = sample_decomposable(2 + seed % 2, 2 + (seed / 2) % 2, seed);
    const auto v = min_cone_test(a);
    CHECK(v.status == ConeStatus::Member);
    CHECK(verify_min_verdict(a, v).ok);
  }
}
