#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "storypath/corpus.hpp"
#include "storypath/embedding.hpp"

namespace storypath::lsa {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Word counts w_kl, one row per paragraph in (narrative, j) order and one
/// column per vocabulary word (sorted alphabetically).
struct TermDocMatrix {
  SparseMatrix counts;
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::size_t> column_of;

  std::size_t document_count() const { return static_cast<std::size_t>(counts.rows()); }
  std::size_t vocabulary_size() const { return vocabulary.size(); }
};

struct EntropyWeights {
  Eigen::VectorXd s;
};

struct SvdFactors {
  Eigen::MatrixXd u;      // documents x d
  Eigen::VectorXd sigma;  // non-increasing
  Eigen::MatrixXd v;      // vocabulary x d
  std::size_t iterations = 0;

  std::size_t dims() const { return static_cast<std::size_t>(sigma.size()); }
};

struct SvdOptions {
  std::size_t oversampling = 10;
  std::size_t min_power_iterations = 2;
  std::size_t max_power_iterations = 500;
  // Stop once every retained singular value moves by less than
  // tolerance * sigma_1 between two subspace iterations.
  double tolerance = 1e-12;
};

enum class Coordinates { scaled, unscaled };  // U*Sigma or U

struct EmbedOptions {
  Coordinates coordinates = Coordinates::scaled;
  bool normalize = false;
};

/// Throws EmptyVocabularyError when min_doc_freq filtering leaves no words.
TermDocMatrix build_term_doc(const corpus::Corpus& corpus, std::size_t min_doc_freq = 1);

/// Same as above over an explicit count matrix (rows = documents).
TermDocMatrix term_doc_from_counts(const SparseMatrix& counts);

/// Log-entropy global weight per word: S_l = 1 + sum_k Q_kl ln Q_kl / ln M,
/// Q_kl = w_kl / sum_k w_kl, with 0 ln 0 = 0. Requires M >= 2.
EntropyWeights entropy_weights(const TermDocMatrix& m);

/// W_kl = S_l ln(w_kl + 1). Keeps the structural pattern of the counts.
SparseMatrix weight_matrix(const TermDocMatrix& m, const EntropyWeights& s);

/// Randomized range finder followed by subspace iteration until the leading
/// d singular values settle. Deterministic for a fixed seed. Throws
/// ConfigError when d exceeds min(rows, cols) and ConvergenceError when the
/// iteration budget runs out.
SvdFactors truncated_svd(const SparseMatrix& w, std::size_t d, std::uint64_t seed,
                         const SvdOptions& options = {});

/// Row (i, j) of the result is row i*n + j-1 of U, scaled by sigma unless
/// unscaled coordinates are requested.
EmbeddingSet embed_paragraphs(const SvdFactors& f, const std::vector<std::string>& ids, std::size_t n,
                              const EmbedOptions& options = {});

struct LsaConfig {
  std::size_t dims = 300;
  std::size_t min_doc_freq = 1;
  std::uint64_t svd_seed = 0;
  EmbedOptions embed;
  // Corpus-scale matrices have flat singular-value tails, so the pipeline
  // stops at a looser tolerance than the library default.
  SvdOptions svd{.max_power_iterations = 300, .tolerance = 1e-4};
};

/// build_term_doc -> entropy_weights -> weight_matrix -> truncated_svd ->
/// embed_paragraphs. dims is clamped to the smaller matrix dimension.
EmbeddingSet run_lsa(const corpus::Corpus& corpus, const LsaConfig& config);

}  // namespace storypath::lsa
