#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "storypath/corpus.hpp"
#include "storypath/embedding.hpp"

namespace storypath::io {

inline constexpr const char* kFormatVersion = "v1";

struct EmbeddingHeader {
  std::string version = kFormatVersion;
  std::size_t narratives = 0;  // N
  std::size_t paragraphs = 0;  // n
  std::size_t dims = 0;
  std::string method;
  std::string provenance;  // optional, rest of the header line
};

struct EmbeddingFile {
  EmbeddingHeader header;
  EmbeddingSet set;
};

// Interchange format (UTF-8, tab separated):
//   #emb v1 N=<N> n=<n> d=<d> method=<tag>[ provenance=<free text>]
//   <narrative_id>\t<j>\t<x_1>\t...\t<x_d>
// Rows are written sorted by (narrative_id, j); any order is accepted on read.

/// Throws the EmbeddingSet::check errors before writing anything.
void write_embeddings(const EmbeddingSet& e, std::ostream& out, const std::string& method,
                      const std::string& provenance = {});
void write_embeddings(const EmbeddingSet& e, const std::filesystem::path& path, const std::string& method,
                      const std::string& provenance = {});

/// Each invariant violation raises its own error type: FormatError,
/// VersionMismatchError, DimensionMismatchError, NonFiniteError,
/// DuplicatePairError, MissingPairError, IncompleteSetError.
EmbeddingFile read_embeddings(std::istream& in);
EmbeddingFile read_embeddings(const std::filesystem::path& path);

enum class DiscrepancyKind { unknown_id, missing_id, count_mismatch, paragraph_count_mismatch };

struct Discrepancy {
  DiscrepancyKind kind;
  std::string detail;
};

std::string to_string(DiscrepancyKind kind);

/// Cross-checks an embedding set against the included narratives of a
/// corpus manifest. An empty result means the two agree.
std::vector<Discrepancy> validate(const EmbeddingSet& e, const corpus::CorpusManifest& manifest);

}  // namespace storypath::io
