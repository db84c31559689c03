#pragma once
// Reproducible sampling helpers. Every stream is derived from (seed, index) so
// that independent restarts never share state.

#include <cstdint>
#include <random>
#include <vector>

#include "omaxcones/matcore.hpp"

namespace omaxcones {

/// splitmix64 mix of (seed, stream); used to derive per-restart generators.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(split_seed(seed, stream)) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  std::size_t index(std::size_t n);

  /// Complex Gaussian vector normalized to unit length.
  std::vector<cplx> unit_vector(std::size_t n);
  /// Entries with independent standard normal real and imaginary parts.
  ComplexMatrix ginibre(std::size_t rows, std::size_t cols);
  /// G G^* / cols with G a rows x cols Ginibre matrix.
  ComplexMatrix wishart(std::size_t n, std::size_t cols);
  /// (G + G^*) / 2
  ComplexMatrix hermitian(std::size_t n);
  /// Wishart normalized to unit trace.
  ComplexMatrix density(std::size_t n, std::size_t rank);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace omaxcones
