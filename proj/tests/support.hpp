#pragma once

#include <cmath>
#include <vector>

#include "cridge/common.hpp"
#include "cridge/rng.hpp"

namespace testing {

inline cridge::Vector gaussian_vector(cridge::Rng& rng, cridge::Index n) {
  cridge::Vector v(n);
  for (cridge::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

inline cridge::Matrix gaussian_matrix(cridge::Rng& rng, cridge::Index rows, cridge::Index cols) {
  cridge::Matrix m(rows, cols);
  for (cridge::Index j = 0; j < cols; ++j)
    for (cridge::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

struct MeanSe {
  double mean = 0;
  double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  double mean = 0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double ss = 0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(xs.size());
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

inline MeanSe mean_se(const cridge::Vector& xs) {
  return mean_se(std::vector<double>(xs.data(), xs.data() + xs.size()));
}

}  // namespace testing
