#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "storypath/corpus.hpp"
#include "storypath/embedding_io.hpp"
#include "storypath/error.hpp"
#include "storypath/graph.hpp"
#include "storypath/lsa.hpp"
#include "storypath/meanpath.hpp"
#include "storypath/report.hpp"

namespace py = pybind11;
using namespace storypath;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

graph::EndpointMode endpoints_from(const std::optional<std::pair<std::size_t, std::size_t>>& pinned) {
  return pinned ? graph::EndpointMode::pin(pinned->first, pinned->second) : graph::EndpointMode::free();
}

graph::Tree tree_from(std::size_t n, const std::vector<graph::Edge>& edges) {
  graph::Tree t;
  t.n = n;
  for (const auto& [a, b] : edges) t.edges.push_back(a < b ? graph::Edge{a, b} : graph::Edge{b, a});
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

lsa::TermDocMatrix counts_from(const Eigen::MatrixXd& counts) {
  return lsa::term_doc_from_counts(counts.sparseView());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "storypath: mean narrative paths, LSA embeddings, MST and acyclic TSP orderings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  // corpus
  m.def("segment_paragraphs", &corpus::segment_paragraphs, py::arg("text"));
  m.def(
      "tokenize",
      [](const std::string& text, std::optional<corpus::StopWords> stopwords) {
        return corpus::tokenize(text, stopwords ? &*stopwords : nullptr);
      },
      py::arg("text"), py::arg("stopwords") = py::none());
  m.def(
      "load_corpus_dir",
      [](const std::filesystem::path& dir, std::size_t n) {
        corpus::LoadOptions options;
        options.n = n;
        return to_python(corpus::to_json(corpus::load_corpus(corpus::read_directory(dir), options).manifest));
      },
      py::arg("directory"), py::arg("n") = 50, "Load a directory of .txt narratives; returns the corpus manifest.");

  // lsa
  m.def(
      "entropy_weights", [](const Eigen::MatrixXd& counts) { return lsa::entropy_weights(counts_from(counts)).s; },
      py::arg("counts"), "Per-word log-entropy weights of a documents x words count matrix.");
  m.def(
      "weight_matrix",
      [](const Eigen::MatrixXd& counts) {
        const auto td = counts_from(counts);
        return Eigen::MatrixXd(lsa::weight_matrix(td, lsa::entropy_weights(td)));
      },
      py::arg("counts"));
  m.def(
      "truncated_svd",
      [](const Eigen::MatrixXd& w, std::size_t d, std::uint64_t seed) {
        const lsa::SparseMatrix sparse = w.sparseView();
        const auto f = lsa::truncated_svd(sparse, d, seed);
        return py::make_tuple(f.u, f.sigma, f.v);
      },
      py::arg("matrix"), py::arg("d"), py::arg("seed") = 0, "Returns (U, sigma, V).");

  // embeddings
  py::class_<EmbeddingSet>(m, "EmbeddingSet")
      .def(py::init([](std::vector<std::string> ids, std::size_t n, Eigen::MatrixXd vectors) {
             EmbeddingSet e{std::move(ids), n, std::move(vectors)};
             e.check();
             return e;
           }),
           py::arg("ids"), py::arg("n"), py::arg("vectors"))
      .def_readonly("ids", &EmbeddingSet::ids)
      .def_readonly("n", &EmbeddingSet::n)
      .def_readonly("vectors", &EmbeddingSet::vectors)
      .def_property_readonly("dims", &EmbeddingSet::dims)
      .def("__len__", &EmbeddingSet::narrative_count);
  m.def(
      "read_embeddings",
      [](const std::filesystem::path& path) {
        auto file = io::read_embeddings(path);
        py::dict header;
        header["version"] = file.header.version;
        header["N"] = file.header.narratives;
        header["n"] = file.header.paragraphs;
        header["d"] = file.header.dims;
        header["method"] = file.header.method;
        header["provenance"] = file.header.provenance;
        return py::make_tuple(header, std::move(file.set));
      },
      py::arg("path"), "Returns (header, EmbeddingSet).");
  m.def(
      "write_embeddings",
      [](const EmbeddingSet& e, const std::filesystem::path& path, const std::string& method,
         const std::string& provenance) { io::write_embeddings(e, path, method, provenance); },
      py::arg("embeddings"), py::arg("path"), py::arg("method"), py::arg("provenance") = "");
  m.def(
      "validate",
      [](const EmbeddingSet& e, const std::filesystem::path& manifest) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : io::validate(e, corpus::read_manifest(manifest))) out.emplace_back(io::to_string(d.kind), d.detail);
        return out;
      },
      py::arg("embeddings"), py::arg("manifest"), "List of (kind, detail) discrepancies against a corpus.json file.");

  // meanpath
  m.def(
      "mean_path", [](const EmbeddingSet& e) { return meanpath::mean_path(e).points; }, py::arg("embeddings"));
  m.def(
      "make_permutations",
      [](std::size_t narratives, std::size_t n, std::uint64_t seed) {
        return meanpath::make_permutations(narratives, n, seed).perms;
      },
      py::arg("narratives"), py::arg("n"), py::arg("seed"), "0-based paragraph permutations, one per narrative.");
  m.def(
      "shuffled_mean_path",
      [](const EmbeddingSet& e, std::vector<std::vector<std::size_t>> perms) {
        meanpath::PermutationSet p;
        p.perms = std::move(perms);
        return meanpath::shuffled_mean_path(e, p).points;
      },
      py::arg("embeddings"), py::arg("permutations"));
  m.def(
      "action", [](const Eigen::MatrixXd& points, double alpha) { return meanpath::action(points, {alpha}); },
      py::arg("points"), py::arg("alpha") = 1.0, "alpha * sum of squared successive displacements.");

  // graph
  m.def(
      "distance_matrix",
      [](const Eigen::MatrixXd& points, const std::string& metric) {
        return graph::distance_matrix(points, graph::metric_from_string(metric)).entries();
      },
      py::arg("points"), py::arg("metric") = "squared_euclidean");
  m.def(
      "mst",
      [](const Eigen::MatrixXd& dm) {
        const auto t = graph::mst(graph::DistanceMatrix(dm, graph::Metric::squared_euclidean));
        return py::make_tuple(t.edges, t.total_weight);
      },
      py::arg("distances"), "Returns (sorted 1-based edges, total weight).");
  m.def(
      "atsp_exact",
      [](const Eigen::MatrixXd& dm, std::optional<std::pair<std::size_t, std::size_t>> pinned) {
        const auto p = graph::atsp_exact(graph::DistanceMatrix(dm, graph::Metric::squared_euclidean), endpoints_from(pinned));
        return py::make_tuple(p.order, p.cost);
      },
      py::arg("distances"), py::arg("pinned") = py::none());
  m.def(
      "atsp_heuristic",
      [](const Eigen::MatrixXd& dm, std::optional<std::pair<std::size_t, std::size_t>> pinned, std::uint64_t seed) {
        const auto p =
            graph::atsp_heuristic(graph::DistanceMatrix(dm, graph::Metric::squared_euclidean), endpoints_from(pinned), seed);
        return py::make_tuple(p.order, p.cost);
      },
      py::arg("distances"), py::arg("pinned") = py::none(), py::arg("seed") = 0);
  m.def(
      "path_cost",
      [](const std::vector<std::size_t>& order, const Eigen::MatrixXd& dm) {
        return graph::path_cost(order, graph::DistanceMatrix(dm, graph::Metric::squared_euclidean));
      },
      py::arg("order"), py::arg("distances"));

  // report
  m.def(
      "canonical_orientation",
      [](std::vector<std::size_t> order) {
        graph::PathOrder p;
        p.order = std::move(order);
        return report::canonical_orientation(p).order;
      },
      py::arg("order"));
  m.def(
      "initial_ordered_run", [](const std::vector<std::size_t>& order) { return report::initial_ordered_run(order); },
      py::arg("order"));
  m.def(
      "mst_initial_chain",
      [](std::size_t n, const std::vector<graph::Edge>& edges) { return report::mst_initial_chain(tree_from(n, edges)); },
      py::arg("n"), py::arg("edges"));
  m.def(
      "render_table",
      [](const std::vector<std::size_t>& order, std::size_t columns) { return report::render_table(order, columns); },
      py::arg("order"), py::arg("columns") = 25);
  m.def(
      "export_dot",
      [](std::size_t n, const std::vector<graph::Edge>& edges) { return report::export_dot(tree_from(n, edges)); },
      py::arg("n"), py::arg("edges"));
  m.def(
      "run_experiment",
      [](const EmbeddingSet& e, const std::string& metric, const std::string& solver, bool pin_endpoints,
         std::vector<std::uint64_t> shuffle_seeds, std::optional<std::size_t> subsample_n, std::uint64_t subsample_seed,
         std::uint64_t solver_seed, double alpha, const std::string& method) {
        report::ExperimentConfig cfg;
        cfg.metric = graph::metric_from_string(metric);
        cfg.solver = graph::solver_from_string(solver);
        cfg.pin_endpoints = pin_endpoints;
        cfg.shuffle_seeds = std::move(shuffle_seeds);
        cfg.subsample_n = subsample_n;
        cfg.subsample_seed = subsample_seed;
        cfg.solver_seed = solver_seed;
        cfg.alpha = alpha;
        cfg.embedding_method = method;
        return to_python(report::to_json(report::run_experiment(e, cfg)));
      },
      py::arg("embeddings"), py::arg("metric") = "squared_euclidean", py::arg("solver") = "heuristic",
      py::arg("pin_endpoints") = false, py::arg("shuffle_seeds") = std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
      py::arg("subsample_n") = py::none(), py::arg("subsample_seed") = 0, py::arg("solver_seed") = 0,
      py::arg("alpha") = 1.0, py::arg("method") = "lsa", "Returns the experiment report as a dict.");
}
