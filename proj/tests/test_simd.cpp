#include "doctest.h"

#include <string>
#include <vector>

#include "omaxcones/random.hpp"
#include "omaxcones/simd/kernels.hpp"

using namespace omaxcones;
using omaxcones::simd::KernelTable;

namespace {

std::vector<cplx> random_vec(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(rng.normal(), rng.normal());
  return v;
}

// Every variant compiled in and runnable on this CPU, reference first.
std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out{&simd::scalar_kernels()};
  if (const auto* t = simd::avx2_kernels()) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("active kernel table is one of the known variants") {
  const auto& active = simd::active_kernels();
  bool known = false;
  for (const auto* t : variants()) known = known || (t == &active);
  CHECK(known);
  MESSAGE("active kernels: " << std::string(active.name));
}

TEST_CASE("SIMD kernels match the scalar reference") {
  Rng rng(1);
  const auto& ref = simd::scalar_kernels();
  for (const auto* k : variants()) {
    CAPTURE(k->name);
    // Lengths cover empty input, pure tails and mixed vector + tail.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 33u, 100u}) {
      const auto a = random_vec(rng, n), b = random_vec(rng, n);
      const cplx alpha(rng.normal(), rng.normal());

      auto y_ref = b, y = b;
      ref.caxpy(alpha, a.data(), y_ref.data(), n);
      k->caxpy(alpha, a.data(), y.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - y_ref[i]) <= 1e-14 * (1 + std::abs(y_ref[i])));

      const double scale = 1.0 + static_cast<double>(n);
      CHECK(std::abs(k->cdotc(a.data(), b.data(), n) - ref.cdotc(a.data(), b.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(k->cdotu(a.data(), b.data(), n) - ref.cdotu(a.data(), b.data(), n)) <= 1e-13 * scale);

      std::vector<double> x1(n), y1(n);
      for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.normal();
        y1[i] = rng.normal();
      }
      auto x2 = x1, y2 = y1;
      const double th = rng.uniform(0, 6.28);
      ref.rotate(x1.data(), y1.data(), n, std::cos(th), std::sin(th));
      k->rotate(x2.data(), y2.data(), n, std::cos(th), std::sin(th));
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x1[i] - x2[i]) <= 1e-14 * (1 + std::abs(x1[i])));
        CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1 + std::abs(y1[i])));
      }
    }
  }
}

TEST_CASE("scalar kernels reproduce std::complex arithmetic exactly") {
  const auto& ref = simd::scalar_kernels();
  const std::vector<cplx> a{{1, 2}, {3, -1}}, b{{0.5, 0.25}, {-2, 4}};
  cplx dotc = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
  cplx dotu = a[0] * b[0] + a[1] * b[1];
  CHECK(ref.cdotc(a.data(), b.data(), 2) == dotc);
  CHECK(ref.cdotu(a.data(), b.data(), 2) == dotu);
}
