#pragma once

#include <random>

#include "lambda_mb/algebra.hpp"

namespace lambda_mb::testing {

inline ComplexMatrix3 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ComplexMatrix3 m;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = Complex(u(rng), u(rng));
  return m;
}

inline ComplexVector3 random_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {{Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}};
}

inline double max_diff(const ComplexMatrix3& a, const ComplexMatrix3& b) { return (a - b).max_abs(); }

}  // namespace lambda_mb::testing
