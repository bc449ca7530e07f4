#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace testrand {

inline Eigen::MatrixXd gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = n(rng);
  return M;
}

inline Eigen::MatrixXd uniform(int rows, int cols, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = u(rng);
  return M;
}

inline Eigen::VectorXd gaussian_vec(int n, std::uint64_t seed) {
  return gaussian(n, 1, seed).col(0);
}

inline Eigen::MatrixXd symmetric(int n, std::uint64_t seed) {
  const Eigen::MatrixXd M = gaussian(n, n, seed);
  return 0.5 * (M + M.transpose());
}

}  // namespace testrand
