#include "storypath/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "storypath/error.hpp"
#include "storypath/rng.hpp"

namespace storypath::report {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json analysis_json(const PathAnalysis& a) {
  nlohmann::json j = to_json(a.metrics);
  j["order"] = a.order.order;
  j["endpoint_mode"] = graph::to_json(a.order)["endpoint_mode"];
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [x, y] : a.tree.edges) edges.push_back({x, y});
  j["mst_edges"] = std::move(edges);
  j["action"] = a.action;
  if (a.shuffle_seed) j["seed"] = *a.shuffle_seed;
  return j;
}

std::string artifact_stem(const PathAnalysis& a) {
  return a.shuffle_seed ? "shuffled_seed" + std::to_string(*a.shuffle_seed) : std::string("ordered");
}

}  // namespace

std::string to_string(Orientation orientation) {
  return orientation == Orientation::forward ? "forward" : "reversed";
}

std::size_t initial_ordered_run(const std::vector<std::size_t>& order) {
  std::size_t k = 0;
  while (k < order.size() && order[k] == k + 1) ++k;
  return k;
}

std::size_t initial_ordered_run(const graph::PathOrder& order) { return initial_ordered_run(order.order); }

graph::PathOrder canonical_orientation(const graph::PathOrder& order) {
  graph::PathOrder reversed = order;
  std::reverse(reversed.order.begin(), reversed.order.end());
  const std::size_t forward_run = initial_ordered_run(order);
  const std::size_t reverse_run = initial_ordered_run(reversed);
  if (reverse_run > forward_run) return reversed;
  if (reverse_run == forward_run && !order.order.empty() && reversed.order.front() < order.order.front()) {
    return reversed;
  }
  return order;
}

Orientation orientation_choice(const std::vector<std::size_t>& order) {
  if (order.size() < 2 || order.front() < order.back()) return Orientation::forward;
  return Orientation::reversed;
}

std::size_t run_allowing_one_inversion(const std::vector<std::size_t>& order) {
  std::size_t k = 0;
  bool swapped = false;
  while (k < order.size()) {
    if (order[k] == k + 1) {
      ++k;
    } else if (!swapped && k + 1 < order.size() && order[k] == k + 2 && order[k + 1] == k + 1) {
      swapped = true;
      k += 2;
    } else {
      break;
    }
  }
  return k;
}

std::size_t mst_initial_chain(const graph::Tree& tree) {
  std::set<graph::Edge> edges;
  for (const auto& [a, b] : tree.edges) edges.insert({std::min(a, b), std::max(a, b)});
  std::size_t k = 1;
  while (k < tree.n && edges.contains({k, k + 1})) ++k;
  return k;
}

std::string render_table(const std::vector<std::size_t>& order, std::size_t columns) {
  if (columns == 0) throw ConfigError("table needs at least one column");
  std::size_t max_label = 0;
  for (std::size_t v : order) max_label = std::max(max_label, v);
  const std::size_t width = std::to_string(max_label).size();
  std::string out;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::string cell = std::to_string(order[t]);
    if (t % columns != 0) out.push_back(' ');
    out.append(width - cell.size(), ' ');
    out.append(cell);
    if (t % columns == columns - 1 || t + 1 == order.size()) out.push_back('\n');
  }
  return out;
}

std::string render_table(const graph::PathOrder& order, std::size_t columns) {
  return render_table(order.order, columns);
}

std::string export_dot(const graph::Tree& tree, const std::vector<std::string>& labels) {
  std::vector<graph::Edge> edges = tree.edges;
  std::sort(edges.begin(), edges.end());
  std::ostringstream out;
  out << "graph mst {\n";
  for (std::size_t k = 1; k <= tree.n; ++k) {
    out << "  " << k;
    if (k <= labels.size() && !labels[k - 1].empty()) {
      std::string label;
      for (char c : labels[k - 1]) {
        if (c == '"' || c == '\\') label.push_back('\\');
        label.push_back(c);
      }
      out << " [label=\"" << label << "\"]";
    }
    out << ";\n";
  }
  for (const auto& [a, b] : edges) out << "  " << a << " -- " << b << ";\n";
  out << "}\n";
  return out.str();
}

PathAnalysis analyze_path(const meanpath::MeanPath& path, const ExperimentConfig& config) {
  const graph::DistanceMatrix dm = graph::distance_matrix(path.points, config.metric);
  const std::size_t n = dm.size();
  const graph::EndpointMode endpoints =
      config.pin_endpoints ? graph::EndpointMode::pin(1, n) : graph::EndpointMode::free();

  PathAnalysis a;
  a.tree = graph::mst(dm);
  a.order = graph::solve_atsp(dm, config.solver, endpoints, config.solver_seed);
  a.metrics.atsp_initial_run = initial_ordered_run(a.order);
  a.metrics.atsp_run_one_inversion = run_allowing_one_inversion(a.order.order);
  a.metrics.mst_initial_chain = mst_initial_chain(a.tree);
  a.metrics.atsp_cost = a.order.cost;
  a.metrics.mst_weight = a.tree.total_weight;
  a.metrics.orientation = orientation_choice(a.order.order);
  a.action = meanpath::action(path.points, {config.alpha});
  a.shuffle_seed = path.shuffled ? path.seed : std::nullopt;
  a.table = render_table(a.order, config.table_columns);
  a.dot = export_dot(a.tree);
  return a;
}

EmbeddingSet subsample(const EmbeddingSet& e, std::size_t count, std::uint64_t seed) {
  const std::size_t total = e.narrative_count();
  if (count == 0 || count > total) {
    throw ConfigError("subsample size " + std::to_string(count) + " must be in 1.." + std::to_string(total));
  }
  std::vector<std::size_t> index(total);
  for (std::size_t i = 0; i < total; ++i) index[i] = i;
  Rng rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t r = k + static_cast<std::size_t>(rng.below(total - k));
    std::swap(index[k], index[r]);
  }
  index.resize(count);
  std::sort(index.begin(), index.end());

  EmbeddingSet out;
  out.n = e.n;
  out.vectors.resize(static_cast<Eigen::Index>(count * e.n), static_cast<Eigen::Index>(e.dims()));
  for (std::size_t k = 0; k < count; ++k) {
    out.ids.push_back(e.ids[index[k]]);
    out.vectors.middleRows(static_cast<Eigen::Index>(k * e.n), static_cast<Eigen::Index>(e.n)) =
        e.vectors.middleRows(static_cast<Eigen::Index>(index[k] * e.n), static_cast<Eigen::Index>(e.n));
  }
  return out;
}

ExperimentReport run_experiment(const EmbeddingSet& input, const ExperimentConfig& config) {
  input.check();
  if (input.n < 2) throw ConfigError("experiments need n >= 2");
  const std::set<std::uint64_t> unique_seeds(config.shuffle_seeds.begin(), config.shuffle_seeds.end());
  if (unique_seeds.size() != config.shuffle_seeds.size()) throw ConfigError("shuffle seeds must be distinct");

  ExperimentReport report;
  const EmbeddingSet sampled =
      config.subsample_n ? subsample(input, *config.subsample_n, config.subsample_seed) : EmbeddingSet{};
  const EmbeddingSet& e = config.subsample_n ? sampled : input;
  if (config.subsample_n) report.subsample_ids = e.ids;

  report.narratives = e.narrative_count();
  report.paragraphs = e.n;
  report.dims = e.dims();
  report.ordered = analyze_path(meanpath::mean_path(e), config);
  for (std::uint64_t seed : config.shuffle_seeds) {
    const auto perms = meanpath::make_permutations(e.narrative_count(), e.n, seed);
    report.shuffled.push_back(analyze_path(meanpath::shuffled_mean_path(e, perms), config));
  }

  nlohmann::json cfg = config.extra;
  cfg["embedding_method"] = config.embedding_method;
  cfg["N"] = report.narratives;
  cfg["N_input"] = input.narrative_count();
  cfg["n"] = report.paragraphs;
  cfg["dims"] = report.dims;
  cfg["metric"] = graph::to_string(config.metric);
  cfg["solver"] = graph::to_string(config.solver);
  cfg["endpoint_mode"] = config.pin_endpoints ? "pinned" : "free";
  cfg["alpha"] = config.alpha;
  cfg["table_columns"] = config.table_columns;
  cfg["subsample_n"] = config.subsample_n ? nlohmann::json(*config.subsample_n) : nlohmann::json(nullptr);
  cfg["subsample_seed"] = config.subsample_seed;
  cfg["solver_seed"] = config.solver_seed;
  cfg["shuffle_seeds"] = config.shuffle_seeds;
  report.config = std::move(cfg);
  report.timestamp = utc_timestamp();
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

nlohmann::json to_json(const RunMetrics& m) {
  return {{"atsp_initial_run", m.atsp_initial_run},
          {"atsp_run_one_inversion", m.atsp_run_one_inversion},
          {"mst_initial_chain", m.mst_initial_chain},
          {"atsp_cost", m.atsp_cost},
          {"mst_weight", m.mst_weight},
          {"orientation", to_string(m.orientation)}};
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json shuffled = nlohmann::json::array();
  std::vector<double> runs, chains, actions;
  std::vector<std::uint64_t> seeds;
  nlohmann::json shuffled_actions = nlohmann::json::array();
  for (const auto& a : report.shuffled) {
    shuffled.push_back(analysis_json(a));
    runs.push_back(static_cast<double>(a.metrics.atsp_initial_run));
    chains.push_back(static_cast<double>(a.metrics.mst_initial_chain));
    actions.push_back(a.action);
    shuffled_actions.push_back(a.action);
    seeds.push_back(*a.shuffle_seed);
  }

  const nlohmann::json& cfg = report.config;
  nlohmann::json subsample = nullptr;
  if (!report.subsample_ids.empty()) {
    subsample = {{"n", report.subsample_ids.size()},
                 {"seed", cfg.value("subsample_seed", std::uint64_t{0})},
                 {"ids", report.subsample_ids}};
  }
  nlohmann::json seeds_json = {{"solver", cfg.value("solver_seed", std::uint64_t{0})}, {"shuffle", seeds}};
  seeds_json["subsample"] = report.subsample_ids.empty() ? nlohmann::json(nullptr) : subsample["seed"];

  return {{"format", "storypath-experiment-report"},
          {"version", 1},
          {"config", cfg},
          {"ordered", analysis_json(report.ordered)},
          {"shuffled", std::move(shuffled)},
          {"summary",
           {{"shuffled_initial_run_median", median(runs)},
            {"shuffled_initial_run_max", runs.empty() ? 0.0 : *std::max_element(runs.begin(), runs.end())},
            {"shuffled_mst_chain_median", median(chains)},
            {"shuffle_count", report.shuffled.size()}}},
          {"actions",
           {{"ordered", report.ordered.action},
            {"shuffled", std::move(shuffled_actions)},
            {"shuffled_median", median(actions)}}},
          {"seeds", std::move(seeds_json)},
          {"subsample", std::move(subsample)},
          {"versions", {{"storypath", "1.0.0"}, {"report_format", 1}, {"embedding_format", "v1"}}},
          {"timestamp", report.timestamp}};
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const nlohmann::json j = to_json(report);
  const std::string method = report.config.value("embedding_method", std::string("unknown"));
  const std::string caption = method + ", N=" + std::to_string(report.narratives);

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  std::string tables = "Paragraphs in the correct storytelling order, " + caption + "\n" + report.ordered.table;
  files.emplace_back(dir / "ordered_table.txt", report.ordered.table);
  files.emplace_back(dir / "ordered_mst.dot", report.ordered.dot);
  for (const auto& a : report.shuffled) {
    const std::string stem = artifact_stem(a);
    files.emplace_back(dir / (stem + "_table.txt"), a.table);
    files.emplace_back(dir / (stem + "_mst.dot"), a.dot);
    tables += "Paragraphs shuffled (seed " + std::to_string(*a.shuffle_seed) + "), " + caption + "\n" + a.table;
  }
  files.emplace_back(dir / "tables.txt", tables);
  files.emplace_back(dir / "report.json", j.dump(2) + "\n");

  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    write_text(path, text);
    written.push_back(path);
  }
  return written;
}

std::string summarize(const nlohmann::json& report) {
  try {
    const auto& cfg = report.at("config");
    const auto& ordered = report.at("ordered");
    const auto& summary = report.at("summary");
    std::ostringstream out;
    out << "embedding " << cfg.at("embedding_method").get<std::string>() << ", N=" << cfg.at("N").get<std::size_t>()
        << ", n=" << cfg.at("n").get<std::size_t>() << ", d=" << cfg.at("dims").get<std::size_t>() << ", metric "
        << cfg.at("metric").get<std::string>() << ", solver " << cfg.at("solver").get<std::string>() << "\n";
    out << "ordered:  A-TSP initial run " << ordered.at("atsp_initial_run").get<std::size_t>()
        << " (one inversion allowed: " << ordered.at("atsp_run_one_inversion").get<std::size_t>()
        << "), MST initial chain " << ordered.at("mst_initial_chain").get<std::size_t>() << ", action "
        << ordered.at("action").get<double>() << "\n";
    out << "shuffled: " << summary.at("shuffle_count").get<std::size_t>() << " seeds, median initial run "
        << summary.at("shuffled_initial_run_median").get<double>() << ", max "
        << summary.at("shuffled_initial_run_max").get<double>() << ", median MST chain "
        << summary.at("shuffled_mst_chain_median").get<double>() << ", median action "
        << report.at("actions").at("shuffled_median").get<double>() << "\n";
    out << "\nordered A-TSP sequence:\n"
        << render_table(ordered.at("order").get<std::vector<std::size_t>>(), cfg.value("table_columns", 25));
    return out.str();
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed experiment report: ") + ex.what());
  }
}

}  // namespace storypath::report
