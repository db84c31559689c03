#include "omaxcones/random.hpp"

#include <cmath>

namespace omaxcones {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

std::size_t Rng::index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::vector<cplx> Rng::unit_vector(std::size_t n) {
  std::vector<cplx> v(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& z : v) {
      z = cplx(normal(), normal());
      s += std::norm(z);
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& z : v) z *= inv;
  return v;
}

ComplexMatrix Rng::ginibre(std::size_t rows, std::size_t cols) {
  ComplexMatrix g(rows, cols);
  for (auto& z : g.data()) z = cplx(normal(), normal());
  return g;
}

ComplexMatrix Rng::wishart(std::size_t n, std::size_t cols) {
  const auto g = ginibre(n, cols);
  auto w = g * g.adjoint();
  w *= 1.0 / static_cast<double>(cols);
  return hermitian_part(w);
}

ComplexMatrix Rng::hermitian(std::size_t n) { return hermitian_part(ginibre(n, n)); }

ComplexMatrix Rng::density(std::size_t n, std::size_t rank) {
  auto w = wishart(n, rank);
  w *= 1.0 / w.trace().real();
  return w;
}

}  // namespace omaxcones
