#include "storypath/meanpath.hpp"

#include <numeric>
#include <string>

#include "storypath/error.hpp"
#include "storypath/rng.hpp"

namespace storypath::meanpath {

namespace {

void check_alpha(const ActionConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive, got " + std::to_string(cfg.alpha));
}

// Accumulates rows narrative by narrative so every configuration of the
// permutations sums each coordinate in the same order i = 1..N.
template <typename PickParagraph>
Eigen::MatrixXd average(const EmbeddingSet& e, PickParagraph pick) {
  const auto n = static_cast<Eigen::Index>(e.n);
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(e.dims()));
  for (std::size_t i = 0; i < e.narrative_count(); ++i) {
    for (std::size_t j = 0; j < e.n; ++j) {
      points.row(static_cast<Eigen::Index>(j)) += e.vector(i, pick(i, j) + 1);
    }
  }
  points /= static_cast<double>(e.narrative_count());
  return points;
}

}  // namespace

PermutationSet PermutationSet::identity(std::size_t narratives, std::size_t n) {
  PermutationSet p;
  p.perms.assign(narratives, std::vector<std::size_t>(n));
  for (auto& perm : p.perms) std::iota(perm.begin(), perm.end(), std::size_t{0});
  return p;
}

bool PermutationSet::is_valid(std::size_t n) const {
  for (const auto& perm : perms) {
    if (perm.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t v : perm) {
      if (v >= n || seen[v]) return false;
      seen[v] = true;
    }
  }
  return true;
}

MeanPath mean_path(const EmbeddingSet& e) {
  e.check();
  MeanPath path;
  path.points = average(e, [](std::size_t, std::size_t j) { return j; });
  path.narratives = e.narrative_count();
  return path;
}

PermutationSet make_permutations(std::size_t narratives, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("permutations need n >= 2, got " + std::to_string(n));
  PermutationSet p = PermutationSet::identity(narratives, n);
  p.seed = seed;
  Rng rng(seed);
  for (auto& perm : p.perms) {
    for (std::size_t k = n - 1; k > 0; --k) {
      const auto r = static_cast<std::size_t>(rng.below(k + 1));
      std::swap(perm[k], perm[r]);
    }
  }
  return p;
}

MeanPath shuffled_mean_path(const EmbeddingSet& e, const PermutationSet& p) {
  e.check();
  if (p.perms.size() != e.narrative_count()) {
    throw ShapeMismatchError("permutation set covers " + std::to_string(p.perms.size()) + " narratives, embeddings have " +
                             std::to_string(e.narrative_count()));
  }
  if (!p.is_valid(e.n)) throw ShapeMismatchError("permutations are not bijections on 1.." + std::to_string(e.n));
  MeanPath path;
  path.points = average(e, [&](std::size_t i, std::size_t j) { return p.perms[i][j]; });
  path.narratives = e.narrative_count();
  path.shuffled = true;
  path.seed = p.seed;
  return path;
}

double action(const Eigen::MatrixXd& points, const ActionConfig& cfg) {
  check_alpha(cfg);
  if (points.rows() < 1) throw DataError("action needs at least one point");
  double sum = 0.0;
  for (Eigen::Index j = 1; j < points.rows(); ++j) sum += (points.row(j) - points.row(j - 1)).squaredNorm();
  return cfg.alpha * sum;
}

double action(const std::vector<Eigen::VectorXd>& points, const ActionConfig& cfg) {
  if (points.empty()) throw DataError("action needs at least one point");
  const Eigen::Index dims = points.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), dims);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != dims) {
      throw DimensionMismatchError("point " + std::to_string(j + 1) + " has " + std::to_string(points[j].size()) +
                                   " coordinates, expected " + std::to_string(dims));
    }
    m.row(static_cast<Eigen::Index>(j)) = points[j].transpose();
  }
  return action(m, cfg);
}

}  // namespace storypath::meanpath
