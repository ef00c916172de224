#include "storypath/embedding_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "storypath/error.hpp"

namespace storypath::io {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    parts.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::size_t parse_count(std::string_view text, std::string_view what, std::size_t line) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("line " + std::to_string(line) + ": invalid " + std::string(what) + " '" + std::string(text) +
                      "'");
  }
  return value;
}

std::string sanitize(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

EmbeddingHeader parse_header(std::string_view line) {
  if (line.substr(0, 5) != "#emb ") throw FormatError("line 1: missing '#emb' header");
  line.remove_prefix(5);
  EmbeddingHeader h;
  h.version.clear();

  std::optional<std::size_t> big_n, small_n, dims;
  bool have_method = false;
  bool first = true;
  while (!line.empty()) {
    const std::size_t space = line.find(' ');
    std::string_view token = line.substr(0, space);
    if (first) {
      if (token != kFormatVersion) {
        throw VersionMismatchError("unsupported embedding format version '" + std::string(token) + "', expected " +
                                   kFormatVersion);
      }
      h.version = std::string(token);
      first = false;
    } else if (token.substr(0, 11) == "provenance=") {
      h.provenance = std::string(line.substr(11));
      break;
    } else if (!token.empty()) {
      const std::size_t eq = token.find('=');
      if (eq == std::string_view::npos) throw FormatError("line 1: malformed header field '" + std::string(token) + "'");
      const std::string_view key = token.substr(0, eq);
      const std::string_view value = token.substr(eq + 1);
      if (key == "N") {
        big_n = parse_count(value, "N", 1);
      } else if (key == "n") {
        small_n = parse_count(value, "n", 1);
      } else if (key == "d") {
        dims = parse_count(value, "d", 1);
      } else if (key == "method") {
        h.method = std::string(value);
        have_method = !value.empty();
      } else {
        throw FormatError("line 1: unknown header field '" + std::string(key) + "'");
      }
    }
    if (space == std::string_view::npos) break;
    line.remove_prefix(space + 1);
  }
  if (first) throw VersionMismatchError("embedding header carries no format version");
  if (!big_n || !small_n || !dims || !have_method) throw FormatError("line 1: header needs N, n, d and method");
  if (*big_n == 0 || *small_n == 0 || *dims == 0) throw FormatError("line 1: N, n and d must be positive");
  h.narratives = *big_n;
  h.paragraphs = *small_n;
  h.dims = *dims;
  return h;
}

}  // namespace

void write_embeddings(const EmbeddingSet& e, std::ostream& out, const std::string& method,
                      const std::string& provenance) {
  e.check();
  if (method.empty() || method.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError("embedding method tag must be a non-empty word, got '" + method + "'");
  }
  for (const auto& id : e.ids) {
    if (id.empty() || id.find_first_of("\t\n\r") != std::string::npos) {
      throw DataError("narrative id '" + id + "' cannot be written to a tab-separated file");
    }
  }

  out << "#emb " << kFormatVersion << " N=" << e.narrative_count() << " n=" << e.n << " d=" << e.dims()
      << " method=" << method;
  if (!provenance.empty()) out << " provenance=" << sanitize(provenance);
  out << '\n';

  char buffer[64];
  for (std::size_t i = 0; i < e.narrative_count(); ++i) {
    for (std::size_t j = 1; j <= e.n; ++j) {
      out << e.ids[i] << '\t' << j;
      const auto row = e.vector(i, j);
      for (Eigen::Index c = 0; c < row.size(); ++c) {
        // Shortest representation that parses back to the same double.
        const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, row(c));
        out << '\t' << std::string_view(buffer, static_cast<std::size_t>(ptr - buffer));
      }
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed");
}

void write_embeddings(const EmbeddingSet& e, const std::filesystem::path& path, const std::string& method,
                      const std::string& provenance) {
  std::ostringstream buffer;
  write_embeddings(e, buffer, method, provenance);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << buffer.str();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

EmbeddingFile read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty embedding file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  EmbeddingFile file;
  file.header = parse_header(line);
  const EmbeddingHeader& h = file.header;

  std::map<std::string, std::vector<std::optional<Eigen::VectorXd>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != h.dims + 2) {
      throw DimensionMismatchError("line " + std::to_string(line_no) + ": " +
                                   std::to_string(fields.size() < 2 ? 0 : fields.size() - 2) +
                                   " values, header declares d=" + std::to_string(h.dims));
    }
    const std::string id(fields[0]);
    if (id.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty narrative id");
    const std::size_t j = parse_count(fields[1], "paragraph index", line_no);
    if (j < 1 || j > h.paragraphs) {
      throw FormatError("line " + std::to_string(line_no) + ": paragraph index " + std::to_string(j) +
                        " outside 1.." + std::to_string(h.paragraphs));
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(h.dims));
    for (std::size_t c = 0; c < h.dims; ++c) {
      const std::string_view text = fields[c + 2];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw FormatError("line " + std::to_string(line_no) + ": invalid number '" + std::string(text) + "'");
      }
      if (!std::isfinite(value)) {
        throw NonFiniteError("line " + std::to_string(line_no) + ": non-finite value '" + std::string(text) +
                             "' for (" + id + ", " + std::to_string(j) + ")");
      }
      v(static_cast<Eigen::Index>(c)) = value;
    }
    auto& slots = rows[id];
    if (slots.empty()) slots.resize(h.paragraphs);
    if (slots[j - 1]) throw DuplicatePairError("duplicate embedding for (" + id + ", " + std::to_string(j) + ")");
    slots[j - 1] = std::move(v);
  }

  for (const auto& [id, slots] : rows) {
    for (std::size_t j = 0; j < slots.size(); ++j) {
      if (!slots[j]) throw MissingPairError(id, j + 1);
    }
  }
  if (rows.size() != h.narratives) {
    throw IncompleteSetError("file holds " + std::to_string(rows.size()) + " narratives, header declares N=" +
                             std::to_string(h.narratives));
  }

  EmbeddingSet& e = file.set;
  e.n = h.paragraphs;
  e.vectors.resize(static_cast<Eigen::Index>(h.narratives * h.paragraphs), static_cast<Eigen::Index>(h.dims));
  for (const auto& [id, slots] : rows) {
    const std::size_t i = e.ids.size();
    e.ids.push_back(id);
    for (std::size_t j = 1; j <= h.paragraphs; ++j) {
      e.vectors.row(static_cast<Eigen::Index>(e.row_index(i, j))) = slots[j - 1]->transpose();
    }
  }
  e.check();
  return file;
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("embedding file not found: " + path.string());
  return read_embeddings(in);
}

std::string to_string(DiscrepancyKind kind) {
  switch (kind) {
    case DiscrepancyKind::unknown_id:
      return "unknown id";
    case DiscrepancyKind::missing_id:
      return "missing id";
    case DiscrepancyKind::count_mismatch:
      return "count mismatch";
    case DiscrepancyKind::paragraph_count_mismatch:
      return "paragraph count mismatch";
  }
  return "unknown";
}

std::vector<Discrepancy> validate(const EmbeddingSet& e, const corpus::CorpusManifest& manifest) {
  std::vector<Discrepancy> out;
  std::map<std::string, const corpus::ManifestEntry*> by_id;
  for (const auto& entry : manifest.entries) by_id.emplace(entry.id, &entry);
  const std::set<std::string> present(e.ids.begin(), e.ids.end());

  bool id_problems = false;
  for (const auto& id : e.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      out.push_back({DiscrepancyKind::unknown_id, "'" + id + "' is not in the manifest"});
      id_problems = true;
    } else if (!it->second->included) {
      out.push_back({DiscrepancyKind::unknown_id, "'" + id + "' is excluded in the manifest"});
      id_problems = true;
    }
  }
  for (const auto& entry : manifest.entries) {
    if (entry.included && !present.contains(entry.id)) {
      out.push_back({DiscrepancyKind::missing_id, "'" + entry.id + "' has no embeddings"});
      id_problems = true;
    }
  }
  if (manifest.n != e.n) {
    out.push_back({DiscrepancyKind::paragraph_count_mismatch,
                   "embeddings have n=" + std::to_string(e.n) + ", manifest n=" + std::to_string(manifest.n)});
  }
  if (!id_problems && manifest.declared_count && *manifest.declared_count != e.narrative_count()) {
    out.push_back({DiscrepancyKind::count_mismatch, "embeddings have N=" + std::to_string(e.narrative_count()) +
                                                        ", manifest declares N=" +
                                                        std::to_string(*manifest.declared_count)});
  }
  return out;
}

}  // namespace storypath::io
