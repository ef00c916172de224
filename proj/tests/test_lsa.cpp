#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "storypath/error.hpp"
#include "storypath/lsa.hpp"

namespace storypath::lsa {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

corpus::Corpus make_corpus(const std::vector<std::vector<std::string>>& narratives) {
  corpus::Corpus c;
  c.n = narratives.front().size();
  for (std::size_t i = 0; i < narratives.size(); ++i) {
    corpus::Narrative n{"n" + std::to_string(i), {}};
    for (std::size_t j = 0; j < narratives[i].size(); ++j) {
      n.paragraphs.push_back({n.id, j + 1, narratives[i][j], corpus::tokenize(narratives[i][j])});
    }
    c.narratives.push_back(std::move(n));
  }
  return c;
}

SparseMatrix sparse(const MatrixXd& m) { return m.sparseView(); }

double count(const TermDocMatrix& m, std::size_t doc, const std::string& word) {
  return m.counts.coeff(static_cast<Eigen::Index>(doc), static_cast<Eigen::Index>(m.column_of.at(word)));
}

TEST(BuildTermDoc, SmallCorpus) {
  const auto m = build_term_doc(make_corpus({{"a b", "b"}}));
  EXPECT_EQ(m.document_count(), 2u);
  EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(count(m, 0, "a"), 1.0);
  EXPECT_EQ(count(m, 1, "a"), 0.0);
  EXPECT_EQ(count(m, 0, "b"), 1.0);
  EXPECT_EQ(count(m, 1, "b"), 1.0);
}

TEST(BuildTermDoc, MinDocFreq) {
  const auto m = build_term_doc(make_corpus({{"a b", "b"}}), 2);
  EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"b"}));
  EXPECT_THROW(build_term_doc(make_corpus({{"a b", "c"}}), 2), EmptyVocabularyError);
}

TEST(BuildTermDoc, HandCountedTwoByTwo) {
  // Documents in (narrative, j) order: "x y x", "y", "z z z", "x z".
  const auto m = build_term_doc(make_corpus({{"x y x", "y"}, {"z z z", "x z"}}));
  ASSERT_EQ(m.document_count(), 4u);
  const MatrixXd expected = (MatrixXd(4, 3) << 2, 1, 0, 0, 1, 0, 0, 0, 3, 1, 0, 1).finished();
  EXPECT_EQ(MatrixXd(m.counts), expected);
}

TEST(EntropyWeights, AnalyticCases) {
  // Columns: single-document word, uniform word, (2,2,0,0).
  const MatrixXd counts = (MatrixXd(4, 3) << 5, 3, 2, 0, 3, 2, 0, 3, 0, 0, 3, 0).finished();
  const auto s = entropy_weights(term_doc_from_counts(sparse(counts))).s;
  EXPECT_NEAR(s(0), 1.0, 1e-12);
  EXPECT_NEAR(s(1), 0.0, 1e-12);
  EXPECT_NEAR(s(2), 1.0 - std::log(2.0) / std::log(4.0), 1e-12);
  EXPECT_NEAR(s(2), 0.5, 1e-12);
}

TEST(EntropyWeights, NeedsTwoDocuments) {
  EXPECT_THROW(entropy_weights(term_doc_from_counts(sparse(MatrixXd::Ones(1, 3)))), DataError);
}

TEST(EntropyWeights, BoundedAndScaleCovariant) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index docs = 2 + static_cast<Eigen::Index>(gen() % 12);
    const Eigen::Index words = 1 + static_cast<Eigen::Index>(gen() % 8);
    MatrixXd counts = MatrixXd::Zero(docs, words);
    for (Eigen::Index l = 0; l < words; ++l) {
      counts(static_cast<Eigen::Index>(gen() % docs), l) = 1 + static_cast<double>(gen() % 5);
      for (Eigen::Index k = 0; k < docs; ++k)
        if (gen() % 3 == 0) counts(k, l) += static_cast<double>(gen() % 4);
    }
    const auto s = entropy_weights(term_doc_from_counts(sparse(counts))).s;
    MatrixXd scaled = counts;
    scaled.col(0) *= 7.0;
    const auto s_scaled = entropy_weights(term_doc_from_counts(sparse(scaled))).s;
    for (Eigen::Index l = 0; l < words; ++l) {
      EXPECT_GE(s(l), 0.0);
      EXPECT_LE(s(l), 1.0);
      std::vector<double> column(counts.col(l).data(), counts.col(l).data() + docs);
      EXPECT_NEAR(s(l), std::clamp(testing::entropy_weight_oracle(column), 0.0, 1.0), 1e-12);
    }
    EXPECT_NEAR(s_scaled(0), s(0), 1e-12);
  }
}

TEST(WeightMatrix, LogScaling) {
  const MatrixXd counts = (MatrixXd(2, 2) << 0, 2, std::numbers::e - 1.0, 0).finished();
  const auto td = term_doc_from_counts(sparse(counts));
  EntropyWeights s{(VectorXd(2) << 1.0, 0.5).finished()};
  const MatrixXd w = MatrixXd(weight_matrix(td, s));
  EXPECT_EQ(w(0, 0), 0.0);
  EXPECT_NEAR(w(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(w(0, 1), 0.5 * std::log(3.0), 1e-15);
  EXPECT_NEAR(w(0, 1), 0.5493, 1e-4);
  EXPECT_THROW(weight_matrix(td, EntropyWeights{VectorXd::Ones(3)}), DimensionMismatchError);
}

TEST(WeightMatrix, PreservesSparsityPattern) {
  std::mt19937_64 gen(9);
  MatrixXd counts = MatrixXd::Zero(20, 15);
  for (int k = 0; k < 60; ++k) counts(gen() % 20, gen() % 15) += 1 + gen() % 3;
  const auto td = term_doc_from_counts(sparse(counts));
  const auto w = weight_matrix(td, entropy_weights(td));
  ASSERT_EQ(w.nonZeros(), td.counts.nonZeros());
  for (Eigen::Index k = 0; k < w.outerSize(); ++k) {
    SparseMatrix::InnerIterator a(w, k), b(td.counts, k);
    for (; a && b; ++a, ++b) EXPECT_EQ(a.col(), b.col());
  }
}

TEST(TruncatedSvd, Diagonal) {
  const MatrixXd d = VectorXd((VectorXd(3) << 3, 2, 1).finished()).asDiagonal();
  const auto f = truncated_svd(sparse(d), 2, 0);
  ASSERT_EQ(f.dims(), 2u);
  EXPECT_NEAR(f.sigma(0), 3.0, 1e-12);
  EXPECT_NEAR(f.sigma(1), 2.0, 1e-12);
}

TEST(TruncatedSvd, RankOne) {
  std::mt19937_64 gen(1);
  const VectorXd u = testing::random_points(gen, 50, 1);
  const VectorXd v = testing::random_points(gen, 70, 1);
  const auto f = truncated_svd(sparse(u * v.transpose()), 4, 3);
  EXPECT_NEAR(f.sigma(0), u.norm() * v.norm(), 1e-9 * u.norm() * v.norm());
  for (Eigen::Index c = 1; c < 4; ++c) EXPECT_LT(f.sigma(c), 1e-9);
}

TEST(TruncatedSvd, MatchesDenseOracleOnRandomMatrix) {
  std::mt19937_64 gen(2024);
  const MatrixXd a = testing::random_points(gen, 40, 60);
  const auto oracle = testing::dense_svd_oracle(a);
  const auto f = truncated_svd(sparse(a), 10, 17);
  for (Eigen::Index c = 0; c < 10; ++c) EXPECT_NEAR(f.sigma(c) / oracle.sigma(c), 1.0, 1e-6);
  EXPECT_LT((f.u.transpose() * f.u - MatrixXd::Identity(10, 10)).norm(), 1e-8);
  EXPECT_LT((f.v.transpose() * f.v - MatrixXd::Identity(10, 10)).norm(), 1e-8);
  EXPECT_TRUE(std::is_sorted(f.sigma.data(), f.sigma.data() + 10, std::greater<>()));

  const double captured = f.sigma.squaredNorm();
  const double exact = oracle.sigma.head(10).squaredNorm();
  EXPECT_NEAR(captured / exact, 1.0, 0.01);
}

TEST(TruncatedSvd, DeterministicForSeed) {
  std::mt19937_64 gen(8);
  const MatrixXd a = testing::random_points(gen, 30, 45);
  const auto f1 = truncated_svd(sparse(a), 5, 99);
  const auto f2 = truncated_svd(sparse(a), 5, 99);
  EXPECT_EQ(f1.u, f2.u);
  EXPECT_EQ(f1.sigma, f2.sigma);
  EXPECT_EQ(f1.v, f2.v);
}

TEST(TruncatedSvd, ReconstructionErrorNonIncreasingInRank) {
  std::mt19937_64 gen(4);
  const MatrixXd a = testing::random_points(gen, 40, 60);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d <= 10; ++d) {
    const auto f = truncated_svd(sparse(a), d, 1);
    const double err = (a - f.u * f.sigma.asDiagonal() * f.v.transpose()).norm();
    EXPECT_LE(err, previous + 1e-9);
    previous = err;
  }
}

TEST(TruncatedSvd, ErrorPaths) {
  const MatrixXd a = MatrixXd::Identity(4, 6);
  EXPECT_THROW(truncated_svd(sparse(a), 5, 0), ConfigError);
  EXPECT_THROW(truncated_svd(sparse(a), 0, 0), ConfigError);

  std::mt19937_64 gen(6);
  const MatrixXd r = testing::random_points(gen, 40, 60);
  SvdOptions strict;
  strict.max_power_iterations = 1;
  strict.min_power_iterations = 0;
  strict.tolerance = 0.0;
  try {
    truncated_svd(sparse(r), 5, 0, strict);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 1u);
    EXPECT_GT(e.last_change(), 0.0);
  }
}

TEST(EmbedParagraphs, ScalesRowsBySigma) {
  SvdFactors f;
  f.u = (MatrixXd(2, 1) << 0.5, 0.25).finished();
  f.sigma = (VectorXd(1) << 2.0).finished();
  f.v = MatrixXd::Ones(3, 1);
  const auto e = embed_paragraphs(f, {"a"}, 2);
  EXPECT_EQ(e.vector(0, 1)(0), 1.0);
  EXPECT_EQ(e.vector(0, 2)(0), 0.5);
  const auto raw = embed_paragraphs(f, {"a"}, 2, {.coordinates = Coordinates::unscaled});
  EXPECT_EQ(raw.vector(0, 1)(0), 0.5);
  EXPECT_THROW(embed_paragraphs(f, {"a", "b"}, 2), ShapeMismatchError);
}

TEST(EmbedParagraphs, IdentityFactors) {
  SvdFactors f;
  f.u = MatrixXd::Identity(3, 3);
  f.sigma = (VectorXd(3) << 3, 2, 1).finished();
  f.v = MatrixXd::Identity(3, 3);
  const auto e = embed_paragraphs(f, {"x"}, 3);
  EXPECT_EQ(e.vectors, MatrixXd(f.sigma.asDiagonal()));
  const auto unit = embed_paragraphs(f, {"x"}, 3, {.normalize = true});
  for (Eigen::Index r = 0; r < 3; ++r) EXPECT_NEAR(unit.vectors.row(r).norm(), 1.0, 1e-15);
}

TEST(RunLsa, MatchesDenseOracleCoordinates) {
  const auto c = make_corpus({{"the cat sat on the mat", "a dog ran in the park", "the cat and the dog"},
                              {"rain fell on the town", "the park was wet", "a cat slept in the rain"},
                              {"bells rang in town", "dogs bark at bells", "quiet night in the park"}});
  LsaConfig cfg;
  cfg.dims = 4;
  const auto e = run_lsa(c, cfg);
  ASSERT_EQ(e.dims(), 4u);
  ASSERT_EQ(e.narrative_count(), 3u);

  const auto td = build_term_doc(c);
  const MatrixXd w = MatrixXd(weight_matrix(td, entropy_weights(td)));
  const auto oracle = testing::dense_svd_oracle(w);
  const MatrixXd expected = oracle.u.leftCols(4) * oracle.sigma.head(4).asDiagonal();
  for (Eigen::Index col = 0; col < 4; ++col) {
    const double sign = expected.col(col).dot(e.vectors.col(col)) < 0 ? -1.0 : 1.0;
    EXPECT_LT((sign * e.vectors.col(col) - expected.col(col)).cwiseAbs().maxCoeff(), 1e-6) << "component " << col;
  }
}

}  // namespace
}  // namespace storypath::lsa
