#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "storypath/embedding.hpp"

namespace storypath::meanpath {

/// Ordered points <P_1> ... <P_n>, one per row.
struct MeanPath {
  Eigen::MatrixXd points;
  std::size_t narratives = 0;  // N averaged over
  bool shuffled = false;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

/// perms[i][j] is the 0-based paragraph of narrative i placed at position j.
struct PermutationSet {
  std::vector<std::vector<std::size_t>> perms;
  std::optional<std::uint64_t> seed;  // empty for hand-built sets

  static PermutationSet identity(std::size_t narratives, std::size_t n);
  bool is_valid(std::size_t n) const;
};

struct ActionConfig {
  double alpha = 1.0;
};

/// <P_j> = (1/N) sum_i P_ij, summed in narrative order per coordinate.
MeanPath mean_path(const EmbeddingSet& e);

/// Independent seeded Fisher-Yates shuffle per narrative, drawn from one
/// stream in narrative order.
PermutationSet make_permutations(std::size_t narratives, std::size_t n, std::uint64_t seed);

/// <P_j> = (1/N) sum_i P_{i, pi(i)_j}. With identity permutations this is
/// bit-identical to mean_path.
MeanPath shuffled_mean_path(const EmbeddingSet& e, const PermutationSet& p);

/// I = alpha * sum_{j>=2} |P_j - P_{j-1}|^2 over the rows of points.
double action(const Eigen::MatrixXd& points, const ActionConfig& cfg = {});
double action(const std::vector<Eigen::VectorXd>& points, const ActionConfig& cfg = {});

}  // namespace storypath::meanpath
