#include "storypath/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "storypath/corpus.hpp"
#include "storypath/embedding_io.hpp"
#include "storypath/error.hpp"
#include "storypath/lsa.hpp"
#include "storypath/report.hpp"

namespace storypath::cli {

namespace {

namespace fs = std::filesystem;

struct CorpusOptions {
  std::string corpus_dir;
  std::string manifest;
  std::size_t n = 50;
  std::size_t min_paragraphs = 0;
  std::string stopwords;
  bool keep_boilerplate = false;
};

struct LsaOptions {
  std::size_t dims = 300;
  std::size_t min_doc_freq = 1;
  std::uint64_t svd_seed = 0;
  double svd_tolerance = lsa::LsaConfig{}.svd.tolerance;
  std::size_t svd_max_iterations = lsa::LsaConfig{}.svd.max_power_iterations;
  bool normalize = false;
  std::string coordinates = "us";
};

struct AnalyzeOptions {
  std::string embeddings;
  std::string corpus_manifest;
  std::string metric = "squared_euclidean";
  std::string solver = "heuristic";
  bool pin_endpoints = false;
  std::vector<std::uint64_t> shuffle_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::optional<std::size_t> subsample_n;
  std::uint64_t subsample_seed = 0;
  std::uint64_t solver_seed = 0;
  double alpha = 1.0;
  std::size_t columns = 25;
};

void add_corpus_options(CLI::App& app, CorpusOptions& o) {
  auto* dir = app.add_option("--corpus-dir", o.corpus_dir, "Directory of .txt narratives (stem = id)");
  auto* list = app.add_option("--manifest", o.manifest, "File listing one narrative path per line");
  dir->excludes(list);
  app.add_option("--n", o.n, "Paragraphs per narrative")->capture_default_str();
  app.add_option("--min-paragraphs", o.min_paragraphs, "Minimum paragraphs to qualify (default n+1)");
  app.add_option("--stopwords", o.stopwords, "Stop-word file, one word per line");
  app.add_flag("--keep-boilerplate", o.keep_boilerplate, "Do not strip Project Gutenberg header/footer");
}

void add_lsa_options(CLI::App& app, LsaOptions& o) {
  app.add_option("--dims", o.dims, "Retained singular values")->capture_default_str();
  app.add_option("--min-doc-freq", o.min_doc_freq, "Drop words found in fewer documents")->capture_default_str();
  app.add_option("--svd-seed", o.svd_seed, "Seed of the randomized SVD")->capture_default_str();
  app.add_option("--svd-tolerance", o.svd_tolerance, "Stop when singular values move less than this times sigma_1")
      ->capture_default_str();
  app.add_option("--svd-max-iterations", o.svd_max_iterations, "Power-iteration budget")->capture_default_str();
  app.add_flag("--normalize", o.normalize, "Length-normalize paragraph vectors");
  app.add_option("--coordinates", o.coordinates, "us (U*Sigma) or u")
      ->check(CLI::IsMember({"us", "u"}))
      ->capture_default_str();
}

void add_out_option(CLI::App& app, std::string& out) {
  app.add_option("--out", out, "Output directory")->envname("STORYPATH_OUT")->capture_default_str();
}

bool has_corpus_input(const CorpusOptions& o) { return !o.corpus_dir.empty() || !o.manifest.empty(); }

corpus::LoadResult load(const CorpusOptions& o) {
  if (!has_corpus_input(o)) throw ConfigError("one of --corpus-dir or --manifest is required");
  if (o.n < 2) throw ConfigError("--n must be at least 2");
  const auto sources = o.corpus_dir.empty() ? corpus::read_path_list(o.manifest) : corpus::read_directory(o.corpus_dir);
  corpus::LoadOptions options;
  options.n = o.n;
  options.min_paragraphs = o.min_paragraphs;
  options.strip_boilerplate = !o.keep_boilerplate;
  if (!o.stopwords.empty()) options.stopwords = corpus::read_stopwords(o.stopwords);
  return corpus::load_corpus(sources, options);
}

lsa::LsaConfig lsa_config(const LsaOptions& o) {
  if (o.dims < 1) throw ConfigError("--dims must be at least 1");
  lsa::LsaConfig cfg;
  cfg.dims = o.dims;
  cfg.min_doc_freq = o.min_doc_freq;
  cfg.svd_seed = o.svd_seed;
  if (!(o.svd_tolerance > 0.0)) throw ConfigError("--svd-tolerance must be positive");
  cfg.svd.tolerance = o.svd_tolerance;
  cfg.svd.max_power_iterations = o.svd_max_iterations;
  cfg.embed.normalize = o.normalize;
  cfg.embed.coordinates = o.coordinates == "u" ? lsa::Coordinates::unscaled : lsa::Coordinates::scaled;
  return cfg;
}

std::string lsa_provenance(const LsaOptions& o, const corpus::Corpus& c, std::size_t dims) {
  std::ostringstream s;
  s << "storypath-lsa dims=" << dims << " requested_dims=" << o.dims << " min_doc_freq=" << o.min_doc_freq
    << " svd_seed=" << o.svd_seed << " svd_tolerance=" << o.svd_tolerance << " coordinates=" << o.coordinates << " normalize=" << (o.normalize ? 1 : 0)
    << " n=" << c.n;
  return s.str();
}

void echo(const fs::path& p) { std::cout << p.string() << '\n'; }

void check_discrepancies(const EmbeddingSet& e, const corpus::CorpusManifest& manifest) {
  const auto found = io::validate(e, manifest);
  if (found.empty()) return;
  std::string msg = "embeddings disagree with the corpus manifest:";
  for (const auto& d : found) msg += " [" + io::to_string(d.kind) + ": " + d.detail + "]";
  throw DataError(msg);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"storypath: mean narrative paths, MST and acyclic TSP orderings", "storypath"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; options go under [<subcommand>] sections");
  std::string out = "storypath_out";

  CorpusOptions corpus_opts;
  LsaOptions lsa_opts;
  AnalyzeOptions analyze_opts;
  std::string report_path;
  bool report_stdout = false;

  auto* ingest = app.add_subcommand("ingest", "Segment and select narratives; write the corpus manifest");
  ingest->fallthrough();
  add_corpus_options(*ingest, corpus_opts);
  add_out_option(*ingest, out);

  auto* embed = app.add_subcommand("embed-lsa", "Embed paragraphs with log-entropy LSA");
  embed->fallthrough();
  add_corpus_options(*embed, corpus_opts);
  add_lsa_options(*embed, lsa_opts);
  add_out_option(*embed, out);

  auto* import = app.add_subcommand("import-embeddings", "Validate an external interchange file");
  import->fallthrough();
  import->add_option("--embeddings", analyze_opts.embeddings, "Interchange TSV file")->required();
  import->add_option("--corpus-manifest", analyze_opts.corpus_manifest, "corpus.json to cross-check against");
  add_out_option(*import, out);

  auto* analyze = app.add_subcommand("analyze", "Mean path, MST and A-TSP with shuffled controls");
  analyze->fallthrough();
  analyze->add_option("--embeddings", analyze_opts.embeddings, "Interchange TSV file (otherwise LSA on the corpus)");
  analyze->add_option("--corpus-manifest", analyze_opts.corpus_manifest, "corpus.json to cross-check against");
  add_corpus_options(*analyze, corpus_opts);
  add_lsa_options(*analyze, lsa_opts);
  analyze->add_option("--metric", analyze_opts.metric, "squared_euclidean or euclidean")
      ->check(CLI::IsMember({"squared_euclidean", "euclidean"}))
      ->capture_default_str();
  analyze->add_option("--solver", analyze_opts.solver, "heuristic or exact (n <= 18)")
      ->check(CLI::IsMember({"heuristic", "exact"}))
      ->capture_default_str();
  analyze->add_flag("--pin-endpoints", analyze_opts.pin_endpoints, "Constrain the path to run from 1 to n");
  analyze->add_option("--shuffle-seeds", analyze_opts.shuffle_seeds, "Comma-separated shuffle seeds")
      ->delimiter(',')
      ->capture_default_str();
  analyze->add_option("--subsample-n", analyze_opts.subsample_n, "Average over a random subset of N narratives");
  analyze->add_option("--subsample-seed", analyze_opts.subsample_seed, "Seed of the subset")->capture_default_str();
  analyze->add_option("--solver-seed", analyze_opts.solver_seed, "Seed of the heuristic")->capture_default_str();
  analyze->add_option("--alpha", analyze_opts.alpha, "Action proportionality constant")->capture_default_str();
  analyze->add_option("--columns", analyze_opts.columns, "Table columns")->capture_default_str();
  add_out_option(*analyze, out);

  auto* report_cmd = app.add_subcommand("report", "Summarize an experiment report");
  report_cmd->add_option("--report", report_path, "report.json (default <out>/report.json)");
  report_cmd->add_flag("--stdout", report_stdout, "Print the summary instead of writing summary.txt");
  add_out_option(*report_cmd, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "storypath: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const fs::path out_dir(out);
    if (*ingest) {
      const auto loaded = load(corpus_opts);
      fs::create_directories(out_dir);
      corpus::write_manifest(loaded.manifest, out_dir / "corpus.json");
      echo(out_dir / "corpus.json");
      corpus::write_paragraphs(loaded.corpus, out_dir / "paragraphs.jsonl");
      echo(out_dir / "paragraphs.jsonl");
    } else if (*embed) {
      const auto loaded = load(corpus_opts);
      const EmbeddingSet e = lsa::run_lsa(loaded.corpus, lsa_config(lsa_opts));
      fs::create_directories(out_dir);
      corpus::write_manifest(loaded.manifest, out_dir / "corpus.json");
      echo(out_dir / "corpus.json");
      io::write_embeddings(e, out_dir / "embeddings_lsa.tsv", "lsa", lsa_provenance(lsa_opts, loaded.corpus, e.dims()));
      echo(out_dir / "embeddings_lsa.tsv");
    } else if (*import) {
      const auto file = io::read_embeddings(fs::path(analyze_opts.embeddings));
      nlohmann::json validation = {{"embeddings", analyze_opts.embeddings},
                                   {"N", file.set.narrative_count()},
                                   {"n", file.set.n},
                                   {"dims", file.set.dims()},
                                   {"method", file.header.method},
                                   {"discrepancies", nlohmann::json::array()}};
      std::vector<io::Discrepancy> found;
      if (!analyze_opts.corpus_manifest.empty()) {
        found = io::validate(file.set, corpus::read_manifest(analyze_opts.corpus_manifest));
        for (const auto& d : found) {
          validation["discrepancies"].push_back({{"kind", io::to_string(d.kind)}, {"detail", d.detail}});
        }
      }
      fs::create_directories(out_dir);
      {
        std::ofstream vout(out_dir / "validation.json");
        vout << validation.dump(2) << '\n';
      }
      echo(out_dir / "validation.json");
      if (!found.empty()) throw DataError(std::to_string(found.size()) + " discrepancies, see validation.json");
      const fs::path copy = out_dir / ("embeddings_" + file.header.method + ".tsv");
      io::write_embeddings(file.set, copy, file.header.method, file.header.provenance);
      echo(copy);
    } else if (*analyze) {
      report::ExperimentConfig cfg;
      cfg.metric = graph::metric_from_string(analyze_opts.metric);
      cfg.solver = graph::solver_from_string(analyze_opts.solver);
      cfg.pin_endpoints = analyze_opts.pin_endpoints;
      cfg.shuffle_seeds = analyze_opts.shuffle_seeds;
      cfg.subsample_n = analyze_opts.subsample_n;
      cfg.subsample_seed = analyze_opts.subsample_seed;
      cfg.solver_seed = analyze_opts.solver_seed;
      cfg.alpha = analyze_opts.alpha;
      cfg.table_columns = analyze_opts.columns;
      if (!(cfg.alpha > 0.0)) throw ConfigError("--alpha must be positive");
      if (cfg.table_columns < 1) throw ConfigError("--columns must be at least 1");

      EmbeddingSet e;
      if (!analyze_opts.embeddings.empty()) {
        if (has_corpus_input(corpus_opts)) throw ConfigError("--embeddings excludes --corpus-dir/--manifest");
        auto file = io::read_embeddings(fs::path(analyze_opts.embeddings));
        cfg.embedding_method = file.header.method;
        cfg.extra["embeddings"] = fs::path(analyze_opts.embeddings).filename().string();
        cfg.extra["provenance"] = file.header.provenance;
        e = std::move(file.set);
      } else {
        const auto loaded = load(corpus_opts);
        e = lsa::run_lsa(loaded.corpus, lsa_config(lsa_opts));
        cfg.embedding_method = "lsa";
        cfg.extra["provenance"] = lsa_provenance(lsa_opts, loaded.corpus, e.dims());
        check_discrepancies(e, loaded.manifest);
      }
      if (!analyze_opts.corpus_manifest.empty()) {
        check_discrepancies(e, corpus::read_manifest(analyze_opts.corpus_manifest));
      }
      if (e.n < 2) throw ConfigError("n must be at least 2");
      const auto result = report::run_experiment(e, cfg);
      for (const auto& p : report::write_artifacts(result, out_dir)) echo(p);
    } else if (*report_cmd) {
      const fs::path path = report_path.empty() ? out_dir / "report.json" : fs::path(report_path);
      std::ifstream in(path);
      if (!in) throw ConfigError("report not found: " + path.string());
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& ex) {
        throw FormatError("malformed report " + path.string() + ": " + ex.what());
      }
      const std::string summary = report::summarize(j);
      if (report_stdout) {
        std::cout << summary;
      } else {
        const fs::path target = path.parent_path() / "summary.txt";
        std::ofstream sout(target);
        if (!sout) throw DataError("cannot write " + target.string());
        sout << summary;
        echo(target);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "storypath: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "storypath: solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "storypath: data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace storypath::cli
