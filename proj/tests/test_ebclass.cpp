#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "omaxcones/ebclass.hpp"
#include "omaxcones/random.hpp"

using namespace omaxcones;
using namespace omaxcones::testing;

namespace {

bool numeric_rank_one(const ComplexMatrix& h) {
  const auto ev = eigvalsh(h);
  return ev.size() < 2 || std::abs(ev[ev.size() - 2]) <= 1e-10 * std::abs(ev.back());
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

// Entanglement-breaking by construction: random Holevo terms with PSD functionals.
MatrixMap random_eb_map(Rng& rng, std::size_t k, std::size_t m) {
  std::vector<HolevoTerm> terms;
  const std::size_t q = 1 + rng.index(3);
  for (std::size_t l = 0; l < q; ++l) terms.push_back({gamma(rng.wishart(k, 1 + rng.index(k))), rng.wishart(m, 1 + rng.index(m))});
  return MatrixMap::from_holevo(k, m, std::move(terms));
}

std::vector<ComplexMatrix> random_rank_one(Rng& rng, std::size_t k, std::size_t m, std::size_t count) {
  std::vector<ComplexMatrix> out;
  for (std::size_t l = 0; l < count; ++l)
    out.push_back(ComplexMatrix::column(rng.unit_vector(k)) * ComplexMatrix::column(rng.unit_vector(m)).adjoint());
  return out;
}

}  // namespace

TEST_CASE("classify: identity map is CP but not EB") {
  const auto v = classify(MatrixMap::identity(2));
  CHECK(v.status == EBStatus::CPNotEB);
  const auto& ppt = std::get<PptViolation>(v.choi_cone.certificate);
  CHECK(ppt.eigenvalue == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(has(v.certificates(), "choi-psd"));
  CHECK(has(v.certificates(), "ppt-violation"));
  CHECK(verify_max_verdict(choi(MatrixMap::identity(2)), v.choi_cone).ok);
}

TEST_CASE("classify: depolarizing map is EB with a single trace term") {
  const auto v = classify(MatrixMap::depolarizing(2, 2));
  REQUIRE(v.status == EBStatus::EB);
  REQUIRE(v.holevo.size() == 1);
  CHECK(max_abs_diff(v.holevo[0].s.y, ComplexMatrix::identity(2)) < 1e-12);
  ComplexMatrix half = ComplexMatrix::identity(2);
  half *= 0.5;
  CHECK(max_abs_diff(v.holevo[0].p, half) < 1e-12);
  CHECK(v.kraus.size() == 4);
  for (const auto& c : v.cross_checks) CHECK_MESSAGE(c.deviation <= 1e-8, c.forms);
  for (const auto* k : {"choi-psd", "separable-choi", "holevo", "rank-one-kraus"}) CHECK(has(v.certificates(), k));
}

TEST_CASE("classify: dephasing map is EB with two vector-state terms") {
  const auto v = classify(MatrixMap::dephasing(2));
  REQUIRE(v.status == EBStatus::EB);
  CHECK(v.holevo.size() == 2);
  for (const auto& t : v.holevo) {
    CHECK(eigvalsh(t.s.y).front() >= -1e-12);
    CHECK(std::abs(t.s.y.trace() - 1.0) < 1e-12);
  }
  for (const auto& c : v.cross_checks) CHECK(c.deviation <= 1e-8);
}

TEST_CASE("classify: transpose map is not CP") {
  const auto v = classify(MatrixMap::transpose(2));
  CHECK(v.status == EBStatus::NotCP);
  CHECK(v.choi_min_eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));
  // The reported eigenvector certifies the negative eigenvalue in one evaluation.
  const auto c = choi(MatrixMap::transpose(2));
  CHECK(quadratic_form(c.flat(), v.choi_min_eigenvector).real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("holevo_from_separable: single product term, depolarizing and random samples") {
  Rng rng(1);
  const auto x = rng.unit_vector(2);
  const auto p = rng.wishart(3, 2);
  SeparableDecomposition one{{{ComplexMatrix::outer(x), p}}};
  const auto c1 = one.resum(2, 3);
  const auto h1 = holevo_from_separable(one, c1);
  CHECK(h1.size() == 1);
  CHECK(max_abs_diff(choi(MatrixMap::from_holevo(2, 3, h1)).flat(), c1.flat()) < 1e-12);

  const auto dep = choi(MatrixMap::depolarizing(2, 3));
  const auto dv = decompose_separable(dep);
  REQUIRE(dv.found);
  const auto hd = MatrixMap::from_holevo(2, 3, holevo_from_separable(dv.decomposition, dep));
  CHECK(basis_deviation(hd, MatrixMap::depolarizing(2, 3)) < 1e-12);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = sample_dmax(2 + seed % 2, 2, 1 + seed % 5, seed);
    const auto h = holevo_from_separable(s.decomposition, s.element);
    CHECK(max_abs_diff(choi(MatrixMap::from_holevo(s.element.n(), 2, h)).flat(), s.element.flat()) < 1e-9);
    for (const auto& t : h) CHECK(numeric_rank_one(t.s.y));
  }

  SeparableDecomposition wrong{{{ComplexMatrix::identity(2), ComplexMatrix::identity(3)}}};
  CHECK_THROWS_AS(holevo_from_separable(wrong, c1), Error);
}

TEST_CASE("kraus and holevo conversions") {
  // A = E_11 gives phi(X) = x_11 E_11.
  const std::vector<ComplexMatrix> e11{ComplexMatrix::unit(2, 3, 0, 0)};
  const auto h = holevo_from_kraus(e11);
  REQUIRE(h.size() == 1);
  const auto phi = MatrixMap::from_holevo(2, 3, h);
  Rng rng(2);
  const auto x = rng.ginibre(2, 2);
  CHECK(max_abs_diff(phi.apply(x), x(0, 0) * ComplexMatrix::unit(3, 3, 0, 0)) < 1e-14);

  const auto dep = MatrixMap::depolarizing(2, 2);
  const auto kd = kraus_from_holevo(dep.holevo());
  CHECK(kd.size() == 4);
  CHECK(basis_deviation(MatrixMap::from_kraus(2, 2, kd), dep) < 1e-12);

  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 3, m = 1 + (trial / 3) % 3;
    const auto kraus = random_rank_one(rng, k, m, 1 + trial % 4);
    const auto original = MatrixMap::from_kraus(k, m, kraus);
    const auto hol = holevo_from_kraus(kraus);
    const auto back = kraus_from_holevo(hol);
    CHECK(basis_deviation(MatrixMap::from_holevo(k, m, hol), original) < 1e-9);
    CHECK(basis_deviation(MatrixMap::from_kraus(k, m, back), original) < 1e-9);
  }
  CHECK_THROWS_AS(holevo_from_kraus({ComplexMatrix::identity(2)}), Error);
  try {
    holevo_from_kraus({ComplexMatrix::identity(2)});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotRankOne);
  }
}

TEST_CASE("round trip closure on random EB maps") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + trial % 3, m = 1 + (trial / 3) % 3;
    const auto phi = random_eb_map(rng, k, m);
    const auto kraus = kraus_from_holevo(phi.holevo());
    const auto hol = holevo_from_kraus(kraus);
    const auto via_choi = map_from_choi(choi(MatrixMap::from_kraus(k, m, kraus)));
    CHECK(basis_deviation(MatrixMap::from_kraus(k, m, kraus), phi) < 1e-9);
    CHECK(basis_deviation(MatrixMap::from_holevo(k, m, hol), phi) < 1e-9);
    CHECK(basis_deviation(via_choi, phi) < 1e-9);
  }
}

TEST_CASE("classify: random Holevo maps are EB with consistent certificates") {
  Rng rng(4);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t k = 2 + trial % 2, m = 2 + (trial / 2) % 2;
    const auto phi = random_eb_map(rng, k, m);
    const auto v = classify(phi);
    INFO("trial " << trial << ": " << v.note);
    REQUIRE(v.status == EBStatus::EB);
    for (const auto& c : v.cross_checks) CHECK(c.deviation <= 1e-8);
    CHECK(verify_max_verdict(choi(phi), v.choi_cone).ok);
    for (const auto& a : v.kraus) CHECK_NOTHROW(holevo_from_kraus({a}));
  }
}

TEST_CASE("cp_omin_falsify: transpose, identity and depolarizing") {
  const auto t = cp_omin_falsify(MatrixMap::transpose(2), 2, 10, 1);
  CHECK(t.not_cp);
  CHECK_FALSE(t.counterexample_found);
  CHECK(t.checked == 0);

  const auto id = cp_omin_falsify(MatrixMap::identity(2), 2, 200, 1);
  CHECK(id.counterexample_found);
  CHECK(id.classified == EBStatus::CPNotEB);
  CHECK(id.consistent);
  CHECK(id.image_min_eigenvalue < 0.0);
  CHECK(min_cone_test(id.counterexample).status == ConeStatus::Member);
  // The swap is block-positive and the identity maps it to itself.
  CHECK_FALSE(is_psd(apply_blockwise(MatrixMap::identity(2), BlockElement(2, 2, swap_operator(2))).flat()).psd);

  const auto dep = cp_omin_falsify(MatrixMap::depolarizing(2, 2), 2, 1000, 2);
  CHECK_FALSE(dep.counterexample_found);
  CHECK(dep.checked == 1000);
  CHECK(dep.classified == EBStatus::EB);
  CHECK(dep.consistent);
}

TEST_CASE("co_eb_check: identity, depolarizing and random Holevo maps") {
  const auto id = co_eb_check(MatrixMap::identity(2));
  CHECK(id.phi == EBStatus::CPNotEB);
  CHECK(id.flat == EBStatus::CPNotEB);
  CHECK(id.consistent);

  const auto dep = co_eb_check(MatrixMap::depolarizing(2, 3));
  CHECK(dep.phi == EBStatus::EB);
  CHECK(dep.flat == EBStatus::EB);

  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const auto r = co_eb_check(random_eb_map(rng, 2, 2 + trial % 2));
    CHECK(r.phi == EBStatus::EB);
    CHECK(r.flat == EBStatus::EB);
    CHECK(r.consistent);
  }
}

TEST_CASE("EB maps send block-positive inputs into the separable cone") {
  Rng rng(6);
  for (int trial = 0; trial < 8; ++trial) {
    const auto phi = random_eb_map(rng, 2, 2);
    const auto input = sample_decomposable(2, 2, 50 + trial);
    const auto image = apply_blockwise(phi, input);
    CHECK(max_cone_test(image).status == ConeStatus::Member);
  }
}

TEST_CASE("pulled-back separable functionals stay nonnegative on block-positive elements") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2, k = 2, m = 2 + trial % 2;
    const auto phi = random_eb_map(rng, k, m);
    REQUIRE(classify(phi).status == EBStatus::EB);
    const auto f = sample_dmax(n, m, 2, trial).element;  // separable functional on M_n(M_m)
    const auto a = sample_decomposable(n, k, trial + 300);
    // (f o phi_n)(a) = f(phi_n(a))
    CHECK(pair(f, apply_blockwise(phi, a)).real() >= -1e-9);
  }
}
