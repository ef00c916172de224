#include "storypath/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "storypath/error.hpp"
#include "storypath/rng.hpp"

namespace storypath::lsa {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormal basis of the column space of y (thin Householder Q).
MatrixXd orthonormalize(const MatrixXd& y) {
  Eigen::HouseholderQR<MatrixXd> qr(y);
  return qr.householderQ() * MatrixXd::Identity(y.rows(), y.cols());
}

// Flips each component so that the largest-magnitude entry of its U column
// is positive (first such entry on ties).
void fix_signs(SvdFactors& f) {
  for (Index c = 0; c < f.u.cols(); ++c) {
    Index arg = 0;
    f.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (f.u(arg, c) < 0.0) {
      f.u.col(c) *= -1.0;
      f.v.col(c) *= -1.0;
    }
  }
}

SvdFactors dense_svd(const SparseMatrix& w, std::size_t d) {
  const MatrixXd dense = MatrixXd(w);
  Eigen::BDCSVD<MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto k = static_cast<Index>(d);
  SvdFactors f;
  f.u = svd.matrixU().leftCols(k);
  f.sigma = svd.singularValues().head(k);
  f.v = svd.matrixV().leftCols(k);
  return f;
}

}  // namespace

TermDocMatrix build_term_doc(const corpus::Corpus& corpus, std::size_t min_doc_freq) {
  if (corpus.narratives.empty()) throw CorpusEmptyError("cannot build a term-document matrix from an empty corpus");

  std::vector<std::map<std::string, std::size_t>> doc_counts;
  doc_counts.reserve(corpus.document_count());
  std::map<std::string, std::size_t> doc_freq;
  for (const auto& narrative : corpus.narratives) {
    if (narrative.paragraphs.size() != corpus.n) {
      throw ShapeMismatchError("narrative '" + narrative.id + "' does not have " + std::to_string(corpus.n) +
                               " paragraphs");
    }
    for (const auto& p : narrative.paragraphs) {
      std::map<std::string, std::size_t> counts;
      for (const auto& t : p.tokens) ++counts[t];
      for (const auto& [word, _] : counts) ++doc_freq[word];
      doc_counts.push_back(std::move(counts));
    }
  }

  TermDocMatrix m;
  for (const auto& [word, df] : doc_freq) {
    if (df >= std::max<std::size_t>(min_doc_freq, 1)) {
      m.column_of.emplace(word, m.vocabulary.size());
      m.vocabulary.push_back(word);
    }
  }
  if (m.vocabulary.empty()) {
    throw EmptyVocabularyError("no word occurs in at least " + std::to_string(min_doc_freq) + " documents");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < doc_counts.size(); ++k) {
    for (const auto& [word, count] : doc_counts[k]) {
      const auto it = m.column_of.find(word);
      if (it == m.column_of.end()) continue;
      triplets.emplace_back(static_cast<Index>(k), static_cast<Index>(it->second), static_cast<double>(count));
    }
  }
  m.counts.resize(static_cast<Index>(doc_counts.size()), static_cast<Index>(m.vocabulary.size()));
  m.counts.setFromTriplets(triplets.begin(), triplets.end());
  m.counts.makeCompressed();
  return m;
}

TermDocMatrix term_doc_from_counts(const SparseMatrix& counts) {
  TermDocMatrix m;
  m.counts = counts;
  m.counts.makeCompressed();
  for (Index l = 0; l < counts.cols(); ++l) {
    std::string word = "w" + std::to_string(l);
    m.column_of.emplace(word, static_cast<std::size_t>(l));
    m.vocabulary.push_back(std::move(word));
  }
  return m;
}

EntropyWeights entropy_weights(const TermDocMatrix& m) {
  const Index docs = m.counts.rows();
  if (docs < 2) throw DataError("entropy weighting needs at least 2 documents, got " + std::to_string(docs));
  const Index words = m.counts.cols();

  VectorXd totals = VectorXd::Zero(words);
  for (Index k = 0; k < m.counts.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.counts, k); it; ++it) totals(it.col()) += it.value();
  }
  VectorXd plogp = VectorXd::Zero(words);
  for (Index k = 0; k < m.counts.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m.counts, k); it; ++it) {
      if (it.value() <= 0.0) continue;  // 0 ln 0 = 0
      const double q = it.value() / totals(it.col());
      plogp(it.col()) += q * std::log(q);
    }
  }

  const double log_docs = std::log(static_cast<double>(docs));
  EntropyWeights s;
  s.s.resize(words);
  for (Index l = 0; l < words; ++l) {
    // Rounding can push a uniform word a few ulps below zero.
    s.s(l) = std::clamp(1.0 + plogp(l) / log_docs, 0.0, 1.0);
  }
  return s;
}

SparseMatrix weight_matrix(const TermDocMatrix& m, const EntropyWeights& s) {
  if (s.s.size() != m.counts.cols()) {
    throw DimensionMismatchError("entropy weights have " + std::to_string(s.s.size()) + " entries for " +
                                 std::to_string(m.counts.cols()) + " words");
  }
  SparseMatrix w = m.counts;
  for (Index k = 0; k < w.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(w, k); it; ++it) it.valueRef() = s.s(it.col()) * std::log1p(it.value());
  }
  return w;
}

SvdFactors truncated_svd(const SparseMatrix& w, std::size_t d, std::uint64_t seed, const SvdOptions& options) {
  const auto rank_bound = static_cast<std::size_t>(std::min(w.rows(), w.cols()));
  if (d == 0 || d > rank_bound) {
    throw ConfigError("requested " + std::to_string(d) + " singular values from a " + std::to_string(w.rows()) +
                      "x" + std::to_string(w.cols()) + " matrix");
  }
  const std::size_t width = std::min(d + options.oversampling, rank_bound);
  if (width == rank_bound) {
    SvdFactors f = dense_svd(w, d);
    fix_signs(f);
    return f;
  }

  const auto l = static_cast<Index>(width);
  const auto k = static_cast<Index>(d);
  Rng rng(seed);
  MatrixXd omega(w.cols(), l);
  for (Index c = 0; c < l; ++c) {
    for (Index r = 0; r < w.cols(); ++r) omega(r, c) = rng.normal();
  }

  MatrixXd q = orthonormalize(w * omega);
  MatrixXd z;
  VectorXd previous;
  std::size_t power = 0;
  double change = 0.0;
  for (;;) {
    // sing(Q^T W) from the Gram matrix of Z = W^T Q. Values at the rounding
    // floor of sigma_1^2 are numerically zero and excluded from the test.
    z = w.transpose() * q;
    const Eigen::SelfAdjointEigenSolver<MatrixXd> gram(z.transpose() * z, Eigen::EigenvaluesOnly);
    const VectorXd squares = gram.eigenvalues().reverse().head(k).cwiseMax(0.0);
    const VectorXd current = squares.cwiseSqrt();
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * squares(0);

    if (previous.size() == k) {
      change = 0.0;
      for (Index c = 0; c < k; ++c) {
        if (squares(c) > floor) change = std::max(change, std::abs(current(c) - previous(c)));
      }
      const double scale = current(0) > 0.0 ? current(0) : 1.0;
      if (power >= options.min_power_iterations && change <= options.tolerance * scale) break;
    }
    if (power >= options.max_power_iterations) {
      throw ConvergenceError("truncated SVD did not converge after " + std::to_string(power) +
                                 " power iterations (last change " + std::to_string(change) + ", d=" +
                                 std::to_string(d) + ", width=" + std::to_string(width) + ")",
                             power, change);
    }
    previous = current;
    q = orthonormalize(w * z);
    ++power;
  }

  // Z = Q2 R, so Q^T W = R^T Q2^T.
  Eigen::HouseholderQR<MatrixXd> qr(z);
  const MatrixXd q2 = qr.householderQ() * MatrixXd::Identity(z.rows(), l);
  const MatrixXd r = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<MatrixXd> core(r.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors f;
  f.u = q * core.matrixU().leftCols(k);
  f.sigma = core.singularValues().head(k);
  f.v = q2 * core.matrixV().leftCols(k);
  f.iterations = power;
  fix_signs(f);
  return f;
}

EmbeddingSet embed_paragraphs(const SvdFactors& f, const std::vector<std::string>& ids, std::size_t n,
                              const EmbedOptions& options) {
  if (static_cast<std::size_t>(f.u.rows()) != ids.size() * n) {
    throw ShapeMismatchError("SVD has " + std::to_string(f.u.rows()) + " document rows, layout needs " +
                             std::to_string(ids.size() * n));
  }
  if (f.u.cols() != f.sigma.size()) throw ShapeMismatchError("U and sigma disagree on dimensionality");
  EmbeddingSet e;
  e.ids = ids;
  e.n = n;
  e.vectors = options.coordinates == Coordinates::scaled ? MatrixXd(f.u * f.sigma.asDiagonal()) : f.u;
  if (options.normalize) {
    for (Index row = 0; row < e.vectors.rows(); ++row) {
      const double norm = e.vectors.row(row).norm();
      if (norm > 0.0) e.vectors.row(row) /= norm;
    }
  }
  return e;
}

EmbeddingSet run_lsa(const corpus::Corpus& corpus, const LsaConfig& config) {
  const TermDocMatrix td = build_term_doc(corpus, config.min_doc_freq);
  const EntropyWeights s = entropy_weights(td);
  const SparseMatrix w = weight_matrix(td, s);
  const std::size_t d = std::min({config.dims, td.document_count(), td.vocabulary_size()});
  if (d == 0) throw ConfigError("dims must be at least 1");
  const SvdFactors f = truncated_svd(w, d, config.svd_seed, config.svd);
  std::vector<std::string> ids;
  ids.reserve(corpus.narratives.size());
  for (const auto& narrative : corpus.narratives) ids.push_back(narrative.id);
  return embed_paragraphs(f, ids, corpus.n, config.embed);
}

}  // namespace storypath::lsa
