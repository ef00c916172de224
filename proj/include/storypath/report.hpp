#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "storypath/embedding.hpp"
#include "storypath/graph.hpp"
#include "storypath/meanpath.hpp"

namespace storypath::report {

enum class Orientation { forward, reversed };

std::string to_string(Orientation orientation);

/// Of an order and its reverse, the one with the longer initial ordered
/// run; on a tie the one whose first label is smaller.
graph::PathOrder canonical_orientation(const graph::PathOrder& order);

/// forward when the order runs from its smaller end label to its larger
/// one; reversed when the run rule picked the other direction.
Orientation orientation_choice(const std::vector<std::size_t>& order);

/// Largest k with order[t] == t for t = 1..k (0 when order[1] != 1).
std::size_t initial_ordered_run(const std::vector<std::size_t>& order);
std::size_t initial_ordered_run(const graph::PathOrder& order);

/// Longest prefix that is a permutation of 1..k differing from the identity
/// by at most one adjacent transposition. Reported next to the strict run.
std::size_t run_allowing_one_inversion(const std::vector<std::size_t>& order);

/// Largest k such that edges (j, j+1) are in the tree for every j < k.
std::size_t mst_initial_chain(const graph::Tree& tree);

/// Row-major table of the labels, fixed-width right-aligned cells
/// separated by one space, one line per row.
std::string render_table(const std::vector<std::size_t>& order, std::size_t columns = 25);
std::string render_table(const graph::PathOrder& order, std::size_t columns = 25);

/// Undirected DOT graph. labels[k] names node k+1; empty labels print the
/// paragraph index.
std::string export_dot(const graph::Tree& tree, const std::vector<std::string>& labels = {});

struct RunMetrics {
  std::size_t atsp_initial_run = 0;
  std::size_t atsp_run_one_inversion = 0;
  std::size_t mst_initial_chain = 0;
  double atsp_cost = 0.0;
  double mst_weight = 0.0;
  Orientation orientation = Orientation::forward;
};

/// Metrics and artifacts for one mean path.
struct PathAnalysis {
  RunMetrics metrics;
  graph::PathOrder order;
  graph::Tree tree;
  double action = 0.0;  // action of the path in natural j order
  std::optional<std::uint64_t> shuffle_seed;
  std::string table;
  std::string dot;
};

struct ExperimentConfig {
  std::string embedding_method = "lsa";
  graph::Metric metric = graph::Metric::squared_euclidean;
  graph::SolverKind solver = graph::SolverKind::heuristic;
  bool pin_endpoints = false;  // pins paragraphs 1 and n
  std::uint64_t solver_seed = 0;
  std::vector<std::uint64_t> shuffle_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::optional<std::size_t> subsample_n;
  std::uint64_t subsample_seed = 0;
  double alpha = 1.0;
  std::size_t table_columns = 25;
  // Extra key/values echoed verbatim into the report config (dims, paths).
  nlohmann::json extra = nlohmann::json::object();
};

struct ExperimentReport {
  nlohmann::json config;
  std::size_t narratives = 0;  // N after subsampling
  std::size_t paragraphs = 0;  // n
  std::size_t dims = 0;
  std::vector<std::string> subsample_ids;  // empty without subsampling
  PathAnalysis ordered;
  std::vector<PathAnalysis> shuffled;
  std::string timestamp;
};

/// distance_matrix -> mst + A-TSP -> metrics for a single mean path.
PathAnalysis analyze_path(const meanpath::MeanPath& path, const ExperimentConfig& config);

/// Uniform random subset of narratives (seeded partial Fisher-Yates), kept
/// in id order. Throws ConfigError when count exceeds N or is zero.
EmbeddingSet subsample(const EmbeddingSet& e, std::size_t count, std::uint64_t seed);

/// Ordered mean path plus one shuffled control per seed.
ExperimentReport run_experiment(const EmbeddingSet& e, const ExperimentConfig& config);

double median(std::vector<double> values);

/// Everything except the timestamp is a pure function of the inputs;
/// the timestamp sits on a line of its own in the dumped JSON.
nlohmann::json to_json(const ExperimentReport& report);
nlohmann::json to_json(const RunMetrics& metrics);

/// Writes report.json, tables and DOT trees under dir; returns the paths
/// written, in order.
std::vector<std::filesystem::path> write_artifacts(const ExperimentReport& report,
                                                   const std::filesystem::path& dir);

/// Human-readable summary of a report JSON (the `report` subcommand).
std::string summarize(const nlohmann::json& report);

}  // namespace storypath::report
