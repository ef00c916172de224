#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "storypath/embedding_io.hpp"
#include "storypath/error.hpp"

#ifndef STORYPATH_FIXTURES
#define STORYPATH_FIXTURES "tests/fixtures"
#endif

namespace storypath::io {
namespace {

EmbeddingSet random_set(std::size_t narratives, std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 3.0);
  EmbeddingSet e;
  for (std::size_t i = 0; i < narratives; ++i) e.ids.push_back("story-" + std::to_string(100 + i));
  e.n = n;
  e.vectors.resize(static_cast<Eigen::Index>(narratives * n), static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < e.vectors.size(); ++k) e.vectors.data()[k] = normal(gen) * std::pow(10.0, normal(gen));
  return e;
}

EmbeddingFile read_string(const std::string& text) {
  std::istringstream in(text);
  return read_embeddings(in);
}

TEST(WriteEmbeddings, HeaderAndRows) {
  const auto e = random_set(1, 2, 3, 1);
  std::ostringstream out;
  write_embeddings(e, out, "lsa");
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0], "#emb v1 N=1 n=2 d=3 method=lsa");
  EXPECT_EQ(all[1].substr(0, 12), "story-100\t1\t");
  EXPECT_EQ(all[2].substr(0, 12), "story-100\t2\t");
}

TEST(WriteEmbeddings, EmptySetIsRejectedBeforeWriting) {
  std::ostringstream out;
  EXPECT_THROW(write_embeddings(EmbeddingSet{}, out, "lsa"), IncompleteSetError);
  EXPECT_TRUE(out.str().empty());
  const auto path = std::filesystem::temp_directory_path() / "storypath_never_written.tsv";
  std::filesystem::remove(path);
  EXPECT_THROW(write_embeddings(EmbeddingSet{}, path, "lsa"), IncompleteSetError);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(WriteEmbeddings, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = random_set(1 + seed % 4, 2 + seed % 5, 1 + seed % 7, seed);
    std::ostringstream out;
    write_embeddings(e, out, "lsa", "seed " + std::to_string(seed));
    const auto back = read_string(out.str());
    EXPECT_EQ(back.set.ids, e.ids);
    EXPECT_EQ(back.set.n, e.n);
    EXPECT_EQ(back.header.provenance, "seed " + std::to_string(seed));
    ASSERT_EQ(back.set.vectors.rows(), e.vectors.rows());
    // Within the 1e-9 relative contract; the writer is in fact lossless.
    for (Eigen::Index k = 0; k < e.vectors.size(); ++k) {
      const double a = e.vectors.data()[k], b = back.set.vectors.data()[k];
      EXPECT_LE(std::abs(a - b), 1e-9 * std::abs(a));
      EXPECT_EQ(a, b);
    }
  }
}

TEST(ReadEmbeddings, HandWrittenFixture) {
  const auto file = read_embeddings(std::filesystem::path(STORYPATH_FIXTURES) / "valid_2x2x4.tsv");
  EXPECT_EQ(file.header.method, "doc2vec");
  EXPECT_EQ(file.header.provenance, "hand-written fixture");
  const auto& e = file.set;
  EXPECT_EQ(e.ids, (std::vector<std::string>{"alpha", "beta"}));
  EXPECT_EQ(e.vectors.rows(), 4);
  EXPECT_EQ(e.dims(), 4u);
  EXPECT_EQ(e.vector(0, 2)(0), 1e-3);
  EXPECT_EQ(e.vector(1, 1)(3), 8.0);
  EXPECT_EQ(e.vector(1, 2)(1), -2.0);
}

std::string file_with_rows(std::size_t narratives, std::size_t n, std::size_t skip_i, std::size_t skip_j) {
  std::ostringstream s;
  s << "#emb v1 N=" << narratives << " n=" << n << " d=2 method=test\n";
  for (std::size_t i = 1; i <= narratives; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (!(i == skip_i && j == skip_j)) s << i << '\t' << j << "\t0.5\t1.5\n";
  return s.str();
}

TEST(ReadEmbeddings, MissingPairIsNamed) {
  try {
    read_string(file_with_rows(4, 20, 3, 17));
    FAIL() << "expected MissingPairError";
  } catch (const MissingPairError& e) {
    EXPECT_EQ(e.narrative_id(), "3");
    EXPECT_EQ(e.paragraph(), 17u);
    EXPECT_NE(std::string(e.what()).find("(3, 17)"), std::string::npos);
  }
}

TEST(ReadEmbeddings, DistinctErrors) {
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t1\tNaN\t1\n"), NonFiniteError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t1\tinf\t1\n"), NonFiniteError);
  EXPECT_THROW(read_string("#emb v2 N=1 n=1 d=2 method=x\na\t1\t0\t1\n"), VersionMismatchError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t1\t0\n"), DimensionMismatchError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t1\t0\t1\na\t1\t0\t1\n"), DuplicatePairError);
  EXPECT_THROW(read_string("#emb v1 N=2 n=1 d=2 method=x\na\t1\t0\t1\n"), IncompleteSetError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t2\t0\t1\n"), FormatError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 d=2 method=x\na\t1\tabc\t1\n"), FormatError);
  EXPECT_THROW(read_string("id\tj\tx\n"), FormatError);
  EXPECT_THROW(read_string("#emb v1 N=1 n=1 method=x\n"), FormatError);
  EXPECT_THROW(read_string(""), FormatError);
}

TEST(ReadEmbeddings, ToleratesUnsortedRowsAndCrlf) {
  const auto file = read_string("#emb v1 N=2 n=2 d=1 method=x\r\nb\t2\t4\r\na\t2\t2\r\nb\t1\t3\r\na\t1\t1\r\n");
  EXPECT_EQ(file.set.ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(file.set.vectors.col(0), (Eigen::VectorXd(4) << 1, 2, 3, 4).finished());
}

corpus::CorpusManifest manifest_for(const std::vector<std::string>& ids, std::size_t n) {
  corpus::CorpusManifest m;
  m.n = n;
  for (const auto& id : ids) m.entries.push_back({id, id + ".txt", n + 1, true, {}});
  m.declared_count = ids.size();
  return m;
}

TEST(Validate, MatchingManifest) {
  const auto e = random_set(3, 4, 2, 0);
  EXPECT_TRUE(validate(e, manifest_for(e.ids, 4)).empty());
}

TEST(Validate, ExtraNarrativeIsOneUnknownId) {
  const auto e = random_set(3, 4, 2, 0);
  const auto found = validate(e, manifest_for({e.ids[0], e.ids[1]}, 4));
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].kind, DiscrepancyKind::unknown_id);
  EXPECT_EQ(to_string(found[0].kind), "unknown id");
}

TEST(Validate, CountMismatch) {
  const auto e = random_set(3, 4, 2, 0);
  auto m = manifest_for(e.ids, 4);
  m.declared_count = 5;
  const auto found = validate(e, m);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].kind, DiscrepancyKind::count_mismatch);
}

TEST(Validate, MissingExcludedAndParagraphCount) {
  const auto e = random_set(2, 4, 2, 0);
  auto m = manifest_for({e.ids[0], e.ids[1], "other"}, 5);
  m.entries[1].included = false;
  const auto found = validate(e, m);
  ASSERT_EQ(found.size(), 3u);
  EXPECT_EQ(found[0].kind, DiscrepancyKind::unknown_id);
  EXPECT_EQ(found[1].kind, DiscrepancyKind::missing_id);
  EXPECT_EQ(found[2].kind, DiscrepancyKind::paragraph_count_mismatch);
}

}  // namespace
}  // namespace storypath::io
