#include "storypath/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "storypath/error.hpp"

namespace storypath::corpus {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

bool is_separator(char32_t cp) {
  if (cp < 0x80) {
    return !((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'));
  }
  return (cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x206F) ||
         (cp >= 0x3000 && cp <= 0x303F) || cp == 0xFEFF;
}

char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point at text[pos]; malformed bytes decode as U+0080,
// which is a separator.
char32_t decode(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0x80;
  }
  if (pos + len > text.size()) {
    ++pos;
    return 0x80;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0x80;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string> segment_paragraphs(std::string_view text) {
  std::vector<std::string> paragraphs;
  std::string current;
  bool open = false;
  for (std::string_view line : split_lines(text)) {
    if (trim(line).empty()) {
      if (open) paragraphs.emplace_back(trim(current));
      current.clear();
      open = false;
      continue;
    }
    if (open) current.push_back('\n');
    current.append(line);
    open = true;
  }
  if (open) paragraphs.emplace_back(trim(current));
  return paragraphs;
}

std::vector<std::string> tokenize(std::string_view text, const StopWords* stopwords) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (stopwords == nullptr || !stopwords->contains(word)) tokens.push_back(word);
    word.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode(text, pos);
    if (is_separator(cp)) {
      flush();
    } else {
      append_utf8(word, fold_case(cp));
    }
  }
  flush();
  return tokens;
}

std::string strip_gutenberg_boilerplate(std::string_view text) {
  const auto lines = split_lines(text);
  auto starts_with = [](std::string_view line, std::string_view prefix) {
    line = trim(line);
    return line.substr(0, prefix.size()) == prefix;
  };
  std::size_t begin = 0;
  std::size_t end = lines.size();
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (starts_with(lines[k], "*** START OF")) {
      begin = k + 1;
      break;
    }
  }
  for (std::size_t k = begin; k < lines.size(); ++k) {
    if (starts_with(lines[k], "*** END OF")) {
      end = k;
      break;
    }
  }
  std::string out;
  for (std::size_t k = begin; k < end; ++k) {
    out.append(lines[k]);
    out.push_back('\n');
  }
  return out;
}

std::size_t CorpusManifest::included_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.included; }));
}

std::vector<std::string> CorpusManifest::included_ids() const {
  std::vector<std::string> ids;
  for (const auto& e : entries) {
    if (e.included) ids.push_back(e.id);
  }
  return ids;
}

LoadResult load_corpus(const std::vector<RawNarrative>& sources, const LoadOptions& options) {
  if (options.n < 2) throw ConfigError("paragraphs per story must be at least 2, got " + std::to_string(options.n));
  const std::size_t min_paragraphs = options.min_paragraphs == 0 ? options.n + 1 : options.min_paragraphs;
  if (min_paragraphs < options.n) {
    throw ConfigError("min_paragraphs (" + std::to_string(min_paragraphs) + ") is smaller than n (" +
                      std::to_string(options.n) + ")");
  }

  std::vector<const RawNarrative*> sorted;
  sorted.reserve(sources.size());
  for (const auto& s : sources) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k - 1]->id == sorted[k]->id) throw DataError("duplicate narrative id '" + sorted[k]->id + "'");
  }

  const StopWords* stop = options.stopwords ? &*options.stopwords : nullptr;
  LoadResult result;
  result.corpus.n = options.n;
  result.manifest.n = options.n;
  result.manifest.min_paragraphs = min_paragraphs;
  for (const RawNarrative* source : sorted) {
    const std::string body = options.strip_boilerplate ? strip_gutenberg_boilerplate(source->text) : source->text;
    std::vector<std::string> paragraphs = segment_paragraphs(body);

    ManifestEntry entry{source->id, source->source_path.string(), paragraphs.size(), false, {}};
    if (paragraphs.size() < min_paragraphs) {
      entry.reason = "has " + std::to_string(paragraphs.size()) + " paragraphs, needs at least " +
                     std::to_string(min_paragraphs);
      result.manifest.entries.push_back(std::move(entry));
      continue;
    }
    entry.included = true;
    result.manifest.entries.push_back(std::move(entry));

    Narrative narrative{source->id, {}};
    narrative.paragraphs.reserve(options.n);
    for (std::size_t j = 0; j < options.n; ++j) {
      ParagraphText p{source->id, j + 1, std::move(paragraphs[j]), {}};
      p.tokens = tokenize(p.text, stop);
      narrative.paragraphs.push_back(std::move(p));
    }
    result.corpus.narratives.push_back(std::move(narrative));
  }
  result.manifest.declared_count = result.corpus.narrative_count();
  if (result.corpus.narratives.empty()) {
    throw CorpusEmptyError("no narrative has at least " + std::to_string(min_paragraphs) + " paragraphs (" +
                           std::to_string(sources.size()) + " examined)");
  }
  return result;
}

std::vector<RawNarrative> read_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawNarrative> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back({f.stem().string(), f, read_file(f)});
  return out;
}

std::vector<RawNarrative> read_path_list(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("manifest file not found: " + manifest.string());
  std::vector<RawNarrative> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view path = trim(line);
    if (path.empty()) continue;
    const std::filesystem::path p{std::string(path)};
    if (!std::filesystem::is_regular_file(p)) throw ConfigError("narrative file not found: " + p.string());
    out.push_back({p.stem().string(), p, read_file(p)});
  }
  return out;
}

StopWords read_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("stopword file not found: " + path.string());
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    for (auto& t : tokenize(w)) words.insert(std::move(t));
  }
  return words;
}

nlohmann::json to_json(const CorpusManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    nlohmann::json j{{"id", e.id},
                     {"source_path", e.source_path},
                     {"paragraph_count", e.paragraph_count},
                     {"included", e.included}};
    if (!e.included) j["reason"] = e.reason;
    entries.push_back(std::move(j));
  }
  return {{"format", "storypath-corpus-manifest"},
          {"version", 1},
          {"n", manifest.n},
          {"min_paragraphs", manifest.min_paragraphs},
          {"N", manifest.declared_count.value_or(manifest.included_count())},
          {"narratives", std::move(entries)}};
}

CorpusManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "storypath-corpus-manifest") {
      throw FormatError("not a corpus manifest");
    }
    if (j.at("version").get<int>() != 1) throw VersionMismatchError("unsupported corpus manifest version");
    CorpusManifest m;
    m.n = j.at("n").get<std::size_t>();
    m.min_paragraphs = j.value("min_paragraphs", m.n + 1);
    if (j.contains("N")) m.declared_count = j.at("N").get<std::size_t>();
    for (const auto& e : j.at("narratives")) {
      m.entries.push_back({e.at("id").get<std::string>(), e.value("source_path", std::string{}),
                           e.at("paragraph_count").get<std::size_t>(), e.at("included").get<bool>(),
                           e.value("reason", std::string{})});
    }
    std::sort(m.entries.begin(), m.entries.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed corpus manifest: ") + ex.what());
  }
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("corpus manifest not found: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError("malformed corpus manifest " + path.string() + ": " + ex.what());
  }
  return manifest_from_json(j);
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json(manifest).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

void write_paragraphs(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& narrative : corpus.narratives) {
    for (const auto& p : narrative.paragraphs) {
      out << nlohmann::json{{"id", p.narrative_id}, {"j", p.index}, {"text", p.text}, {"tokens", p.tokens}}.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
          << '\n';
    }
  }
}

}  // namespace storypath::corpus
