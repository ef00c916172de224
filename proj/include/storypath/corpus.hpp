#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace storypath::corpus {

using StopWords = std::unordered_set<std::string>;

struct RawNarrative {
  std::string id;
  std::filesystem::path source_path;
  std::string text;
};

struct ParagraphText {
  std::string narrative_id;
  std::size_t index = 0;  // 1-based
  std::string text;
  std::vector<std::string> tokens;
};

struct Narrative {
  std::string id;
  std::vector<ParagraphText> paragraphs;
};

/// Narratives sorted by id, each truncated to exactly n paragraphs.
struct Corpus {
  std::vector<Narrative> narratives;
  std::size_t n = 0;

  std::size_t narrative_count() const { return narratives.size(); }
  std::size_t document_count() const { return narratives.size() * n; }
};

struct ManifestEntry {
  std::string id;
  std::string source_path;
  std::size_t paragraph_count = 0;
  bool included = false;
  std::string reason;  // empty when included
};

/// Per-source outcome of load_corpus. Consumed by the exporter and by
/// embedding validation.
struct CorpusManifest {
  std::size_t n = 0;
  std::size_t min_paragraphs = 0;
  std::vector<ManifestEntry> entries;  // sorted by id
  // The "N" field of a manifest file, when it carries one.
  std::optional<std::size_t> declared_count;

  std::size_t included_count() const;
  std::vector<std::string> included_ids() const;
};

struct LoadResult {
  Corpus corpus;
  CorpusManifest manifest;
};

struct LoadOptions {
  std::size_t n = 50;
  // Minimum paragraph count a story needs to qualify; 0 means n + 1.
  std::size_t min_paragraphs = 0;
  std::optional<StopWords> stopwords;
  bool strip_boilerplate = true;
};

/// Splits text into maximal runs of non-blank lines. Each paragraph is
/// trimmed; internal line breaks are kept as "\n".
std::vector<std::string> segment_paragraphs(std::string_view text);

/// Lowercases and splits on every non-word character. Word characters are
/// ASCII letters and digits plus non-ASCII code points outside the Latin-1
/// and General Punctuation ranges.
std::vector<std::string> tokenize(std::string_view text, const StopWords* stopwords = nullptr);

/// Keeps only the text between Project Gutenberg "*** START OF" and
/// "*** END OF" marker lines, when present.
std::string strip_gutenberg_boilerplate(std::string_view text);

/// Throws ConfigError when n < 2 or min_paragraphs < n, DataError on
/// duplicate ids, CorpusEmptyError when nothing qualifies.
LoadResult load_corpus(const std::vector<RawNarrative>& sources, const LoadOptions& options);

// Filesystem sources. Both throw ConfigError for missing inputs.
std::vector<RawNarrative> read_directory(const std::filesystem::path& dir);
std::vector<RawNarrative> read_path_list(const std::filesystem::path& manifest);

/// One word per line; blank lines and lines starting with '#' ignored.
StopWords read_stopwords(const std::filesystem::path& path);

nlohmann::json to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& j);
CorpusManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

/// JSON Lines, one object {"id", "j", "text", "tokens"} per paragraph of
/// the included narratives, in (id, j) order.
void write_paragraphs(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace storypath::corpus
