#pragma once

#include "omaxcones/matcore.hpp"

namespace omaxcones::testing {

inline ComplexMatrix swap_operator(std::size_t d) {
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

// Unnormalized maximally entangled element sum_ij E_ij (x) E_ij.
inline ComplexMatrix max_entangled(std::size_t d) {
  ComplexMatrix s(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i * d + i, j * d + j) = 1.0;
  return s;
}

inline ComplexMatrix werner(double p) {
  ComplexMatrix w = ComplexMatrix::identity(4);
  w *= (1.0 - p) / 4.0;
  w.add_scaled(p / 2.0, max_entangled(2));
  return w;
}

}  // namespace omaxcones::testing
