#pragma once

// Synthetic drift corpus: P_ij = j*u + eps, eps uniform in the ball of
// radius 0.3*|u|.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "storypath/embedding.hpp"

namespace storypath::testing {

inline EmbeddingSet drift_corpus(std::size_t narratives, std::size_t n, std::size_t dims, std::uint64_t seed,
                                 double noise_ratio = 0.3) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dims);

  Eigen::VectorXd u(d);
  for (Eigen::Index c = 0; c < d; ++c) u(c) = normal(gen);
  u.normalize();

  EmbeddingSet e;
  e.n = n;
  e.vectors.resize(static_cast<Eigen::Index>(narratives * n), d);
  for (std::size_t i = 0; i < narratives; ++i) {
    std::string id = std::to_string(i);
    e.ids.push_back(std::string(6 - id.size(), '0') + id);
  }
  for (std::size_t i = 0; i < narratives; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      Eigen::VectorXd eps(d);
      for (Eigen::Index c = 0; c < d; ++c) eps(c) = normal(gen);
      const double radius = noise_ratio * std::pow(unit(gen), 1.0 / static_cast<double>(d));
      eps *= radius / eps.norm();
      e.vectors.row(static_cast<Eigen::Index>(e.row_index(i, j))) = (static_cast<double>(j) * u + eps).transpose();
    }
  }
  return e;
}

}  // namespace storypath::testing
