#include "storypath/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "storypath/error.hpp"
#include "storypath/report.hpp"
#include "storypath/rng.hpp"

namespace storypath::graph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Edge make_edge(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

void check_endpoints(const EndpointMode& endpoints, std::size_t n) {
  if (!endpoints.pinned) return;
  if (endpoints.first < 1 || endpoints.first > n || endpoints.last < 1 || endpoints.last > n ||
      endpoints.first == endpoints.last) {
    throw ConfigError("pinned endpoints (" + std::to_string(endpoints.first) + ", " + std::to_string(endpoints.last) +
                      ") are not two distinct labels in 1.." + std::to_string(n));
  }
}

// Open-path local search over 0-based node sequences. In pinned mode the
// first and last positions never move.
class LocalSearch {
 public:
  LocalSearch(const DistanceMatrix& dm, bool pinned) : dm_(dm), pinned_(pinned) {}

  void improve(std::vector<std::size_t>& p) const {
    if (p.size() < 3) return;
    for (;;) {
      const double eps = 1e-12 * std::max(1.0, cost(p));
      if (two_opt(p, eps)) continue;
      if (or_opt(p, eps)) continue;
      break;
    }
  }

  double cost(const std::vector<std::size_t>& p) const {
    double c = 0.0;
    for (std::size_t t = 1; t < p.size(); ++t) c += dm_(p[t - 1], p[t]);
    return c;
  }

 private:
  // Best segment reversal p[i..k]; applied when it gains more than eps.
  bool two_opt(std::vector<std::size_t>& p, double eps) const {
    const std::size_t n = p.size();
    const std::size_t lo = pinned_ ? 1 : 0;
    const std::size_t hi = pinned_ ? n - 2 : n - 1;
    double best = -eps;
    std::optional<std::pair<std::size_t, std::size_t>> move;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t k = i + 1; k <= hi; ++k) {
        double delta = 0.0;
        if (i > 0) delta += dm_(p[i - 1], p[k]) - dm_(p[i - 1], p[i]);
        if (k + 1 < n) delta += dm_(p[i], p[k + 1]) - dm_(p[k], p[k + 1]);
        if (delta < best) {
          best = delta;
          move = {i, k};
        }
      }
    }
    if (!move) return false;
    std::reverse(p.begin() + static_cast<std::ptrdiff_t>(move->first),
                 p.begin() + static_cast<std::ptrdiff_t>(move->second) + 1);
    return true;
  }

  // Best relocation of a segment of 1..3 nodes, optionally reversed.
  bool or_opt(std::vector<std::size_t>& p, double eps) const {
    const std::size_t n = p.size();
    struct Move {
      std::size_t start, length, gap;
      bool reversed;
    };
    double best = -eps;
    std::optional<Move> move;
    std::vector<std::size_t> rest;
    for (std::size_t len = 1; len <= 3 && len < n; ++len) {
      const std::size_t first_start = pinned_ ? 1 : 0;
      for (std::size_t i = first_start; i + len <= n; ++i) {
        if (pinned_ && i + len > n - 1) break;
        const std::size_t head = p[i];
        const std::size_t tail = p[i + len - 1];
        double removal = 0.0;
        const bool has_prev = i > 0;
        const bool has_next = i + len < n;
        if (has_prev) removal -= dm_(p[i - 1], head);
        if (has_next) removal -= dm_(tail, p[i + len]);
        if (has_prev && has_next) removal += dm_(p[i - 1], p[i + len]);

        rest.clear();
        for (std::size_t t = 0; t < n; ++t) {
          if (t < i || t >= i + len) rest.push_back(p[t]);
        }
        const std::size_t m = rest.size();
        const std::size_t gap_lo = pinned_ ? 1 : 0;
        const std::size_t gap_hi = pinned_ ? m - 1 : m;
        for (std::size_t g = gap_lo; g <= gap_hi; ++g) {
          const bool has_left = g > 0;
          const bool has_right = g < m;
          for (const bool reversed : {false, true}) {
            if (g == i && !reversed) continue;  // original position
            if (len == 1 && reversed) continue;
            const std::size_t a = reversed ? tail : head;
            const std::size_t b = reversed ? head : tail;
            double insertion = 0.0;
            if (has_left) insertion += dm_(rest[g - 1], a);
            if (has_right) insertion += dm_(b, rest[g]);
            if (has_left && has_right) insertion -= dm_(rest[g - 1], rest[g]);
            const double delta = removal + insertion;
            if (delta < best) {
              best = delta;
              move = Move{i, len, g, reversed};
            }
          }
        }
      }
    }
    if (!move) return false;
    std::vector<std::size_t> segment(p.begin() + static_cast<std::ptrdiff_t>(move->start),
                                     p.begin() + static_cast<std::ptrdiff_t>(move->start + move->length));
    if (move->reversed) std::reverse(segment.begin(), segment.end());
    p.erase(p.begin() + static_cast<std::ptrdiff_t>(move->start),
            p.begin() + static_cast<std::ptrdiff_t>(move->start + move->length));
    p.insert(p.begin() + static_cast<std::ptrdiff_t>(move->gap), segment.begin(), segment.end());
    return true;
  }

  const DistanceMatrix& dm_;
  bool pinned_;
};

struct Candidate {
  std::vector<std::size_t> order;  // canonical, 1-based
  double cost = kInf;

  bool better_than(const Candidate& other) const {
    if (cost != other.cost) return cost < other.cost;
    return order < other.order;
  }
};

Candidate canonical_candidate(const std::vector<std::size_t>& zero_based, const DistanceMatrix& dm) {
  PathOrder p;
  p.order.reserve(zero_based.size());
  for (std::size_t v : zero_based) p.order.push_back(v + 1);
  p = report::canonical_orientation(p);
  return {p.order, path_cost(p.order, dm)};
}

PathOrder finish(const Candidate& c, SolverKind solver, const EndpointMode& endpoints) {
  PathOrder p;
  p.order = c.order;
  p.cost = c.cost;
  p.solver = solver;
  p.endpoints = endpoints;
  return p;
}

}  // namespace

std::string to_string(Metric metric) {
  return metric == Metric::squared_euclidean ? "squared_euclidean" : "euclidean";
}

Metric metric_from_string(const std::string& name) {
  if (name == "squared_euclidean") return Metric::squared_euclidean;
  if (name == "euclidean") return Metric::euclidean;
  throw ConfigError("unknown metric '" + name + "' (expected squared_euclidean or euclidean)");
}

std::string to_string(SolverKind solver) { return solver == SolverKind::exact ? "exact" : "heuristic"; }

SolverKind solver_from_string(const std::string& name) {
  if (name == "exact") return SolverKind::exact;
  if (name == "heuristic") return SolverKind::heuristic;
  throw ConfigError("unknown solver '" + name + "' (expected exact or heuristic)");
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd entries, Metric metric) : entries_(std::move(entries)), metric_(metric) {
  if (entries_.rows() != entries_.cols()) throw ShapeMismatchError("distance matrix is not square");
  for (Eigen::Index a = 0; a < entries_.rows(); ++a) {
    if (entries_(a, a) != 0.0) throw DataError("distance matrix diagonal is not zero");
    for (Eigen::Index b = a + 1; b < entries_.cols(); ++b) {
      const double v = entries_(a, b);
      if (!std::isfinite(v) || v < 0.0) throw DataError("distance matrix has a negative or non-finite entry");
      if (v != entries_(b, a)) throw DataError("distance matrix is not symmetric");
    }
  }
}

DistanceMatrix distance_matrix(const Eigen::MatrixXd& points, Metric metric) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DataError("distance matrix needs at least 2 points, got " + std::to_string(n));
  if (!points.allFinite()) throw NonFiniteError("points contain non-finite values");
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double sq = (points.row(a) - points.row(b)).squaredNorm();
      const double v = metric == Metric::squared_euclidean ? sq : std::sqrt(sq);
      entries(a, b) = v;
      entries(b, a) = v;
    }
  }
  return DistanceMatrix(std::move(entries), metric);
}

DistanceMatrix distance_matrix(const std::vector<Eigen::VectorXd>& points, Metric metric) {
  if (points.size() < 2) throw DataError("distance matrix needs at least 2 points, got " + std::to_string(points.size()));
  const Eigen::Index dims = points.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), dims);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != dims) {
      throw DimensionMismatchError("point " + std::to_string(k + 1) + " has " + std::to_string(points[k].size()) +
                                   " coordinates, expected " + std::to_string(dims));
    }
    m.row(static_cast<Eigen::Index>(k)) = points[k].transpose();
  }
  return distance_matrix(m, metric);
}

Tree mst(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  if (n < 2) throw DataError("spanning tree needs at least 2 nodes");
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> parent(n, 0);
  in_tree[0] = true;
  for (std::size_t v = 1; v < n; ++v) best[v] = dm(0, v);

  Tree tree;
  tree.n = n;
  for (std::size_t step = 1; step < n; ++step) {
    std::optional<std::size_t> pick;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      if (!pick || best[v] < best[*pick] ||
          (best[v] == best[*pick] && make_edge(parent[v], v) < make_edge(parent[*pick], *pick))) {
        pick = v;
      }
    }
    const std::size_t v = *pick;
    in_tree[v] = true;
    tree.edges.push_back(make_edge(parent[v] + 1, v + 1));
    tree.total_weight += best[v];
    for (std::size_t u = 0; u < n; ++u) {
      if (in_tree[u]) continue;
      const double w = dm(v, u);
      if (w < best[u] || (w == best[u] && make_edge(v, u) < make_edge(parent[u], u))) {
        best[u] = w;
        parent[u] = v;
      }
    }
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

PathOrder atsp_exact(const DistanceMatrix& dm, const EndpointMode& endpoints) {
  const std::size_t n = dm.size();
  if (n > kExactSizeLimit) {
    throw SizeLimitError("exact A-TSP supports at most " + std::to_string(kExactSizeLimit) + " nodes, got " +
                         std::to_string(n));
  }
  if (n < 2) throw DataError("A-TSP needs at least 2 nodes");
  check_endpoints(endpoints, n);

  const std::size_t states = std::size_t{1} << n;
  std::vector<double> cost(states * n, kInf);
  std::vector<std::uint8_t> prev(states * n, 0);
  auto at = [n](std::size_t mask, std::size_t last) { return mask * n + last; };

  if (endpoints.pinned) {
    const std::size_t a = endpoints.first - 1;
    cost[at(std::size_t{1} << a, a)] = 0.0;
  } else {
    for (std::size_t s = 0; s < n; ++s) cost[at(std::size_t{1} << s, s)] = 0.0;
  }

  for (std::size_t mask = 1; mask < states; ++mask) {
    for (std::size_t last = 0; last < n; ++last) {
      if (!(mask & (std::size_t{1} << last))) continue;
      const double base = cost[at(mask, last)];
      if (base == kInf) continue;
      for (std::size_t next = 0; next < n; ++next) {
        const std::size_t bit = std::size_t{1} << next;
        if (mask & bit) continue;
        const double c = base + dm(last, next);
        double& slot = cost[at(mask | bit, next)];
        if (c < slot) {
          slot = c;
          prev[at(mask | bit, next)] = static_cast<std::uint8_t>(last);
        }
      }
    }
  }

  const std::size_t full = states - 1;
  std::size_t last = 0;
  if (endpoints.pinned) {
    last = endpoints.last - 1;
  } else {
    for (std::size_t v = 1; v < n; ++v) {
      if (cost[at(full, v)] < cost[at(full, last)]) last = v;
    }
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::size_t mask = full;
  for (std::size_t step = 0; step < n; ++step) {
    order.push_back(last);
    const std::size_t before = prev[at(mask, last)];
    mask &= ~(std::size_t{1} << last);
    last = before;
  }
  std::reverse(order.begin(), order.end());
  return finish(canonical_candidate(order, dm), SolverKind::exact, endpoints);
}

PathOrder nearest_neighbor(const DistanceMatrix& dm, std::size_t start, const EndpointMode& endpoints) {
  const std::size_t n = dm.size();
  if (n < 2) throw DataError("A-TSP needs at least 2 nodes");
  check_endpoints(endpoints, n);
  if (start < 1 || start > n) throw ConfigError("start label " + std::to_string(start) + " outside 1.." + std::to_string(n));

  std::optional<std::size_t> reserved;
  if (endpoints.pinned) {
    if (start == endpoints.first) {
      reserved = endpoints.last - 1;
    } else if (start == endpoints.last) {
      reserved = endpoints.first - 1;
    } else {
      throw ConfigError("pinned nearest-neighbor path must start at an endpoint");
    }
  }

  std::vector<bool> used(n, false);
  std::vector<std::size_t> order{start - 1};
  used[start - 1] = true;
  if (reserved) used[*reserved] = true;
  while (order.size() < (reserved ? n - 1 : n)) {
    const std::size_t from = order.back();
    std::optional<std::size_t> pick;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      if (!pick || dm(from, v) < dm(from, *pick)) pick = v;
    }
    used[*pick] = true;
    order.push_back(*pick);
  }
  if (reserved) order.push_back(*reserved);

  PathOrder p;
  for (std::size_t v : order) p.order.push_back(v + 1);
  p.cost = path_cost(p.order, dm);
  p.solver = SolverKind::heuristic;
  p.endpoints = endpoints;
  return p;
}

PathOrder atsp_heuristic(const DistanceMatrix& dm, const EndpointMode& endpoints, std::uint64_t seed,
                         const HeuristicOptions& options) {
  const std::size_t n = dm.size();
  if (n < 2) throw DataError("A-TSP needs at least 2 nodes");
  check_endpoints(endpoints, n);
  const LocalSearch search(dm, endpoints.pinned);

  std::vector<std::size_t> starts;
  if (endpoints.pinned) {
    starts = {endpoints.first, endpoints.last};
  } else {
    for (std::size_t s = 1; s <= n; ++s) starts.push_back(s);
  }

  Candidate best;
  for (std::size_t s : starts) {
    const PathOrder nn = nearest_neighbor(dm, s, endpoints);
    std::vector<std::size_t> p;
    for (std::size_t v : nn.order) p.push_back(v - 1);
    search.improve(p);
    const Candidate c = canonical_candidate(p, dm);
    if (c.better_than(best)) best = c;
  }

  // Double-bridge kicks: cut at x < y < z and swap the middle segments.
  if (n >= 4 && options.kicks > 0) {
    Rng rng(seed);
    for (std::size_t k = 0; k < options.kicks; ++k) {
      std::vector<std::size_t> p;
      for (std::size_t v : best.order) p.push_back(v - 1);
      std::size_t cuts[3];
      for (;;) {
        for (auto& c : cuts) c = 1 + static_cast<std::size_t>(rng.below(n - 1));
        std::sort(std::begin(cuts), std::end(cuts));
        if (cuts[0] < cuts[1] && cuts[1] < cuts[2]) break;
      }
      std::vector<std::size_t> kicked(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(cuts[0]));
      kicked.insert(kicked.end(), p.begin() + static_cast<std::ptrdiff_t>(cuts[1]),
                    p.begin() + static_cast<std::ptrdiff_t>(cuts[2]));
      kicked.insert(kicked.end(), p.begin() + static_cast<std::ptrdiff_t>(cuts[0]),
                    p.begin() + static_cast<std::ptrdiff_t>(cuts[1]));
      kicked.insert(kicked.end(), p.begin() + static_cast<std::ptrdiff_t>(cuts[2]), p.end());
      search.improve(kicked);
      const Candidate c = canonical_candidate(kicked, dm);
      if (c.better_than(best)) best = c;
    }
  }
  return finish(best, SolverKind::heuristic, endpoints);
}

PathOrder solve_atsp(const DistanceMatrix& dm, SolverKind solver, const EndpointMode& endpoints, std::uint64_t seed) {
  return solver == SolverKind::exact ? atsp_exact(dm, endpoints) : atsp_heuristic(dm, endpoints, seed);
}

double path_cost(const std::vector<std::size_t>& order, const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  if (order.size() != n) {
    throw InvalidPermutationError("order has " + std::to_string(order.size()) + " labels for " + std::to_string(n) +
                                  " nodes");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t v : order) {
    if (v < 1 || v > n || seen[v - 1]) {
      throw InvalidPermutationError("order is not a permutation of 1.." + std::to_string(n));
    }
    seen[v - 1] = true;
  }
  double c = 0.0;
  for (std::size_t t = 1; t < n; ++t) c += dm(order[t - 1] - 1, order[t] - 1);
  return c;
}

double path_cost(const PathOrder& order, const DistanceMatrix& dm) { return path_cost(order.order, dm); }

nlohmann::json to_json(const DistanceMatrix& dm) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t a = 0; a < dm.size(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < dm.size(); ++b) row.push_back(dm(a, b));
    rows.push_back(std::move(row));
  }
  return {{"n", dm.size()}, {"metric", to_string(dm.metric())}, {"entries", std::move(rows)}};
}

nlohmann::json to_json(const Tree& tree) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : tree.edges) edges.push_back({a, b});
  return {{"n", tree.n}, {"edges", std::move(edges)}, {"total_weight", tree.total_weight}};
}

nlohmann::json to_json(const PathOrder& order) {
  nlohmann::json endpoint = "free";
  if (order.endpoints.pinned) endpoint = {{"pinned", {order.endpoints.first, order.endpoints.last}}};
  return {{"order", order.order}, {"cost", order.cost}, {"solver", to_string(order.solver)}, {"endpoint_mode", endpoint}};
}

}  // namespace storypath::graph
