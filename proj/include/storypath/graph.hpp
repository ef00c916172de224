#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace storypath::graph {

enum class Metric { squared_euclidean, euclidean };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);  // throws ConfigError

/// Symmetric, zero-diagonal pairwise distances between points.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(Eigen::MatrixXd entries, Metric metric);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  Metric metric() const { return metric_; }
  // 0-based indices
  double operator()(std::size_t a, std::size_t b) const {
    return entries_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
  Metric metric_ = Metric::squared_euclidean;
};

/// Undirected edge between 1-based labels, stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

struct Tree {
  std::size_t n = 0;
  std::vector<Edge> edges;  // sorted
  double total_weight = 0.0;
};

enum class SolverKind { exact, heuristic };

std::string to_string(SolverKind solver);
SolverKind solver_from_string(const std::string& name);  // throws ConfigError

/// Free endpoints, or a path whose two ends are the labels {first, last}.
struct EndpointMode {
  bool pinned = false;
  std::size_t first = 0;  // 1-based
  std::size_t last = 0;

  static EndpointMode free() { return {}; }
  static EndpointMode pin(std::size_t a, std::size_t b) { return {true, a, b}; }
};

/// A visiting order over 1-based labels.
struct PathOrder {
  std::vector<std::size_t> order;
  double cost = 0.0;
  SolverKind solver = SolverKind::heuristic;
  EndpointMode endpoints;
};

inline constexpr std::size_t kExactSizeLimit = 18;

/// Rows of points are the nodes. Throws DataError for fewer than two points.
DistanceMatrix distance_matrix(const Eigen::MatrixXd& points, Metric metric = Metric::squared_euclidean);
/// Throws DimensionMismatchError when the vectors disagree in length.
DistanceMatrix distance_matrix(const std::vector<Eigen::VectorXd>& points,
                               Metric metric = Metric::squared_euclidean);

/// Prim's algorithm from node 1. Among equal-weight candidates the edge with
/// the lexicographically smaller (min label, max label) wins.
Tree mst(const DistanceMatrix& dm);

/// Held-Karp over (visited set, last node). Returns the canonical
/// orientation of a minimum-cost open Hamiltonian path. Throws
/// SizeLimitError above kExactSizeLimit nodes.
PathOrder atsp_exact(const DistanceMatrix& dm, const EndpointMode& endpoints = EndpointMode::free());

/// Greedy nearest-neighbor path from one start label (always taking the
/// smallest label on ties). In pinned mode start must be an endpoint.
PathOrder nearest_neighbor(const DistanceMatrix& dm, std::size_t start,
                           const EndpointMode& endpoints = EndpointMode::free());

struct HeuristicOptions {
  std::size_t kicks = 30;  // seeded perturbation rounds after multi-start
};

/// Nearest neighbor from every admissible start, each improved with 2-opt
/// and Or-opt to a local optimum, then seeded perturbation. Selection is by
/// (cost, lexicographic order), so the result does not depend on evaluation
/// order. Returns the canonical orientation.
PathOrder atsp_heuristic(const DistanceMatrix& dm, const EndpointMode& endpoints = EndpointMode::free(),
                         std::uint64_t seed = 0, const HeuristicOptions& options = {});

PathOrder solve_atsp(const DistanceMatrix& dm, SolverKind solver, const EndpointMode& endpoints,
                     std::uint64_t seed);

/// Sum of successive edge weights. Throws InvalidPermutationError unless
/// order is a permutation of 1..n.
double path_cost(const std::vector<std::size_t>& order, const DistanceMatrix& dm);
double path_cost(const PathOrder& order, const DistanceMatrix& dm);

nlohmann::json to_json(const DistanceMatrix& dm);
nlohmann::json to_json(const Tree& tree);
nlohmann::json to_json(const PathOrder& order);

}  // namespace storypath::graph
