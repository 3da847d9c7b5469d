#pragma once

#include <random>

#include "sznf/linalg.hpp"

namespace testing {

// Independent of the library generators: plain Gaussian entries.
inline sznf::ComplexMatrix gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n;
  sznf::ComplexMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = {n(rng), n(rng)};
  return m;
}

inline double max_abs(const sznf::ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace testing
