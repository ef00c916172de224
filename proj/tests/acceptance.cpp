// Acceptance suite: one PASS/FAIL/SKIP line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "storypath/cli.hpp"
#include "storypath/corpus.hpp"
#include "storypath/embedding_io.hpp"
#include "storypath/graph.hpp"
#include "storypath/lsa.hpp"
#include "storypath/meanpath.hpp"
#include "storypath/report.hpp"
#include "synthetic.hpp"

namespace {

using namespace storypath;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

struct Outcome {
  enum { pass, fail, skip } status;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

Outcome fail(std::string d) { return {Outcome::fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Outcome::pass : Outcome::fail, std::move(d)}; }

std::vector<std::size_t> read_sequence(const std::string& name) {
  std::ifstream in(std::string(STORYPATH_FIXTURES) + "/published_sequences.txt");
  for (std::string line; std::getline(in, line);) {
    std::istringstream row(line);
    std::string key;
    row >> key;
    if (key != name) continue;
    std::vector<std::size_t> s;
    for (std::size_t v; row >> v;) s.push_back(v);
    return s;
  }
  throw std::runtime_error("fixture sequence " + name + " not found");
}

std::string slurp_without_timestamp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.find("\"timestamp\"") == std::string::npos) out += line + '\n';
  }
  return out;
}

Outcome entropy_analytics() {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> docs(2, 40), words(1, 12), count(0, 6), pick(0, 1000);
  double worst = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const int m = docs(gen), v = words(gen);
    MatrixXd counts(m, v + 2);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < v; ++l) counts(k, l) = count(gen);
    for (int l = 0; l < v; ++l) counts(pick(gen) % m, l) += 1;  // no empty columns
    counts.col(v).setZero();
    counts(pick(gen) % m, v) = 1 + pick(gen) % 50;
    counts.col(v + 1).setConstant(1 + pick(gen) % 9);
    const auto s = lsa::entropy_weights(lsa::term_doc_from_counts(counts.sparseView())).s;
    worst = std::max({worst, std::abs(s(v) - 1.0), std::abs(s(v + 1))});
    for (int l = 0; l < v; ++l) {
      std::vector<double> column(counts.col(l).data(), counts.col(l).data() + m);
      worst = std::max(worst, std::abs(s(l) - testing::entropy_weight_oracle(column)));
    }
  }
  return check(worst <= 1e-12, std::to_string(trials) + " matrices, max deviation " + num(worst));
}

Outcome svd_fidelity() {
  std::mt19937_64 gen(2);
  double worst = 0.0;
  bool monotone = true;
  for (int t = 0; t < 20; ++t) {
    const MatrixXd a = testing::random_points(gen, 40, 60);
    const lsa::SparseMatrix sa = a.sparseView();
    const auto oracle = testing::dense_svd_oracle(a);
    const auto f = lsa::truncated_svd(sa, 10, static_cast<std::uint64_t>(t));
    for (Eigen::Index c = 0; c < 10; ++c) worst = std::max(worst, std::abs(f.sigma(c) / oracle.sigma(c) - 1.0));
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t d = 1; d <= 10; ++d) {
      const auto g = lsa::truncated_svd(sa, d, static_cast<std::uint64_t>(t));
      const double err = (a - g.u * g.sigma.asDiagonal() * g.v.transpose()).norm();
      monotone = monotone && err <= previous;
      previous = err;
    }
  }
  return check(worst <= 1e-6 && monotone, "20 matrices, max relative sigma error " + num(worst) +
                                              (monotone ? ", reconstruction monotone" : ", reconstruction NOT monotone"));
}

Outcome solver_equivalence() {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> size(4, 12), dims(2, 8), small(2, 8);
  int equal = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto dm = graph::distance_matrix(testing::random_points(gen, size(gen), dims(gen)));
    const double exact = graph::atsp_exact(dm).cost;
    const double heuristic = graph::atsp_heuristic(dm, graph::EndpointMode::free(), static_cast<std::uint64_t>(t)).cost;
    if (heuristic <= exact * (1 + 1e-12)) {
      ++equal;
    } else {
      worst_gap = std::max(worst_gap, heuristic / exact - 1.0);
    }
  }
  int brute_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const auto dm = graph::distance_matrix(testing::random_points(gen, small(gen), 3));
    const double brute = testing::brute_force_path_cost(dm.entries());
    brute_ok += std::abs(graph::atsp_exact(dm).cost - brute) <= 1e-9 * std::max(1.0, brute) ? 1 : 0;
  }
  return check(equal >= 95 && worst_gap <= 0.02 && brute_ok == 50,
               "heuristic optimal on " + std::to_string(equal) + "/100, worst gap " + num(worst_gap * 100) +
                   "%, exact matches brute force on " + std::to_string(brute_ok) + "/50");
}

Outcome mst_invariance() {
  std::mt19937_64 gen(4);
  int same = 0;
  for (int t = 0; t < 50; ++t) {
    const MatrixXd p = testing::random_points(gen, 50, 300);
    same += graph::mst(graph::distance_matrix(p, graph::Metric::squared_euclidean)).edges ==
                    graph::mst(graph::distance_matrix(p, graph::Metric::euclidean)).edges
                ? 1
                : 0;
  }
  return check(same == 50, "identical edge sets on " + std::to_string(same) + "/50 instances");
}

Outcome synthetic_reproduction() {
  const auto e = testing::drift_corpus(200, 50, 300, 5);
  report::ExperimentConfig cfg;
  cfg.embedding_method = "synthetic";
  const auto r = report::run_experiment(e, cfg);
  std::vector<double> runs;
  for (const auto& s : r.shuffled) runs.push_back(static_cast<double>(s.metrics.atsp_initial_run));
  const double med = report::median(runs);
  return check(r.ordered.metrics.atsp_initial_run == 50 && r.ordered.metrics.mst_initial_chain == 50 && med <= 3.0,
               "ordered run " + std::to_string(r.ordered.metrics.atsp_initial_run) + ", MST chain " +
                   std::to_string(r.ordered.metrics.mst_initial_chain) + ", median shuffled run " +
                   num(med));
}

Outcome real_corpus() {
  const char* dir = std::getenv("STORYPATH_GUTENBERG_DIR");
  if (!dir) return {Outcome::skip, "set STORYPATH_GUTENBERG_DIR to a directory of >= 100 stories"};
  const auto loaded = corpus::load_corpus(corpus::read_directory(dir), {});
  if (loaded.corpus.narratives.size() < 100) {
    return {Outcome::skip, std::to_string(loaded.corpus.narratives.size()) + " qualifying stories, need >= 100"};
  }
  const auto e = lsa::run_lsa(loaded.corpus, {});
  const auto r = report::run_experiment(e, {});
  std::size_t max_shuffled = 0;
  for (const auto& s : r.shuffled) max_shuffled = std::max(max_shuffled, s.metrics.atsp_initial_run);
  return check(r.ordered.metrics.atsp_initial_run > max_shuffled && r.ordered.metrics.mst_initial_chain >= 5,
               "N=" + std::to_string(r.narratives) + ", ordered run " +
                   std::to_string(r.ordered.metrics.atsp_initial_run) + ", max shuffled run " +
                   std::to_string(max_shuffled) + ", MST chain " + std::to_string(r.ordered.metrics.mst_initial_chain));
}

Outcome published_tables() {
  auto run = [](const std::string& name) {
    return report::initial_ordered_run(
        report::canonical_orientation({read_sequence(name), 0.0, graph::SolverKind::exact, {}}));
  };
  const std::size_t t1 = run("table1_ordered"), t2 = run("table2_ordered"), t3 = run("table3_ordered");
  const std::size_t s1 = run("table1_shuffled"), s2 = run("table2_shuffled"), s3 = run("table3_shuffled");
  std::ostringstream d;
  d << "ordered " << t1 << "/" << t2 << "/" << t3 << ", shuffled " << s1 << "/" << s2 << "/" << s3;
  return check(t1 == 13 && t2 == 6 && t3 == 10 && s1 == 1 && s2 == 1 && s3 == 1, d.str());
}

Outcome action_function() {
  const MatrixXd hand = (MatrixXd(3, 2) << 0, 0, 1, 0, 1, 1).finished();
  const double value = meanpath::action(hand, {1.0});
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> alpha(0.1, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const MatrixXd p = testing::random_points(gen, 2 + t % 20, 1 + t % 10);
    const VectorXd shift = 5.0 * testing::random_points(gen, p.cols(), 1);
    const double a = alpha(gen);
    const double base = meanpath::action(p);
    worst = std::max({worst, std::abs(meanpath::action(p.rowwise() + shift.transpose()) - base),
                      std::abs(meanpath::action(p, {a}) - a * base)});
  }
  return check(value == 2.0 && worst <= 1e-9,
               "hand path " + num(value) + ", max invariance deviation " + num(worst));
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "storypath_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  io::write_embeddings(testing::drift_corpus(30, 50, 20, 9), root / "drift.tsv", "synthetic", "acceptance corpus");
  for (const char* run : {"a", "b"}) {
    const std::string out = (root / run).string(), emb = (root / "drift.tsv").string();
    const char* argv[] = {"storypath", "analyze", "--embeddings", emb.c_str(), "--solver-seed", "3", "--out", out.c_str()};
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    const int code = cli::run(8, argv);
    std::cout.rdbuf(old);
    if (code != 0) return fail("analyze exited with " + std::to_string(code));
  }
  const std::string a = slurp_without_timestamp(root / "a" / "report.json");
  const std::string b = slurp_without_timestamp(root / "b" / "report.json");
  fs::remove_all(root);
  return check(!a.empty() && a == b, "two analyze runs, " + std::to_string(a.size()) + " bytes compared");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "entropy-weight analytics", 5, entropy_analytics},
      {2, "SVD fidelity", 30, svd_fidelity},
      {3, "solver oracle equivalence", 60, solver_equivalence},
      {4, "MST metric invariance", 20, mst_invariance},
      {5, "synthetic reproduction", 120, synthetic_reproduction},
      {6, "real-corpus qualitative check", 600, real_corpus},
      {7, "metric fidelity to published tables", 5, published_tables},
      {8, "action function", 5, action_function},
      {9, "determinism", 60, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& ex) {
      o = fail(std::string("exception: ") + ex.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Outcome::skip && seconds > c.limit_seconds) {
      o.status = Outcome::fail;
      o.detail += "; exceeded " + std::to_string(static_cast<int>(c.limit_seconds)) + " s";
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::fail ? 1 : 0;
    std::printf("[%s] criterion %d: %s (%.2f s) %s\n", tag, c.id, c.name, seconds, o.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
