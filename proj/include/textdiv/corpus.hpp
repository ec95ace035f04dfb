#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "textdiv/error.hpp"
#include "textdiv/tagset.hpp"
#include "textdiv/tokenizer.hpp"

namespace textdiv {

/// One text unit. Tokens are always the tokenizer's output for `text`
/// (or, for pretagged input, the whitespace-separated tokens with `text`
/// rebuilt as their space-joined form).
class Document {
 public:
  Document() = default;

  Document(std::string id, std::string text) : id_(std::move(id)), text_(std::move(text)) {
    spans_ = token_spans(text_);
    tokens_.reserve(spans_.size());
    for (const TokenSpan& s : spans_) tokens_.emplace_back(text_.substr(s.begin, s.end - s.begin));
  }

  static Document from_tagged(std::string id, std::vector<std::string> tokens,
                              std::vector<std::string> tags) {
    if (tokens.size() != tags.size()) {
      throw InputError("document '" + id + "': " + std::to_string(tokens.size()) + " tokens but " +
                       std::to_string(tags.size()) + " tags");
    }
    Document doc;
    doc.id_ = std::move(id);
    for (const std::string& token : tokens) {
      if (!doc.text_.empty()) doc.text_ += ' ';
      doc.spans_.push_back({doc.text_.size(), doc.text_.size() + token.size()});
      doc.text_ += token;
    }
    doc.tokens_ = std::move(tokens);
    doc.tags_ = std::move(tags);
    return doc;
  }

  const std::string& id() const noexcept { return id_; }
  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<TokenSpan>& spans() const noexcept { return spans_; }
  const std::optional<std::vector<std::string>>& tags() const noexcept { return tags_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  /// Source text covering tokens [start, end), original spacing kept.
  std::string_view surface(std::size_t start, std::size_t end) const {
    if (start >= end || end > spans_.size()) return {};
    return std::string_view(text_).substr(spans_[start].begin,
                                          spans_[end - 1].end - spans_[start].begin);
  }

  Document with_tags(std::vector<std::string> tags) const {
    if (tags.size() != tokens_.size()) {
      throw TaggerError("document '" + id_ + "': tag count " + std::to_string(tags.size()) +
                        " does not match token count " + std::to_string(tokens_.size()));
    }
    Document copy = *this;
    copy.tags_ = std::move(tags);
    return copy;
  }

  Document with_id(std::string id) const {
    Document copy = *this;
    copy.id_ = std::move(id);
    return copy;
  }

  /// First `n` tokens; the text is cut right after the n-th token.
  Document truncated(std::size_t n) const {
    if (n >= tokens_.size()) return *this;
    Document copy;
    copy.id_ = id_;
    copy.text_ = n == 0 ? std::string() : text_.substr(0, spans_[n - 1].end);
    copy.tokens_.assign(tokens_.begin(), tokens_.begin() + static_cast<std::ptrdiff_t>(n));
    copy.spans_.assign(spans_.begin(), spans_.begin() + static_cast<std::ptrdiff_t>(n));
    if (tags_) copy.tags_.emplace(tags_->begin(), tags_->begin() + static_cast<std::ptrdiff_t>(n));
    return copy;
  }

 private:
  std::string id_;
  std::string text_;
  std::vector<std::string> tokens_;
  std::vector<TokenSpan> spans_;
  std::optional<std::vector<std::string>> tags_;
};

enum class Format { Lines, Jsonl, Csv, Pretagged };

inline std::string_view format_name(Format f) {
  switch (f) {
    case Format::Lines: return "lines";
    case Format::Jsonl: return "jsonl";
    case Format::Csv: return "csv";
    case Format::Pretagged: return "pretagged";
  }
  return "lines";
}

inline Format parse_format(std::string_view name) {
  if (name == "lines" || name == "txt" || name == "text") return Format::Lines;
  if (name == "jsonl" || name == "ndjson") return Format::Jsonl;
  if (name == "csv") return Format::Csv;
  if (name == "pretagged" || name == "tagged") return Format::Pretagged;
  throw InputError("unknown corpus format '" + std::string(name) + "'");
}

/// Guess the format from a file extension; plain text when unknown.
inline Format format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return Format::Jsonl;
  if (ext == ".csv") return Format::Csv;
  if (ext == ".tagged" || ext == ".pos") return Format::Pretagged;
  return Format::Lines;
}

/// Where a corpus came from.
struct Provenance {
  std::string path;
  std::string format;
  std::string field;
  std::string options;
};

/// Ordered, immutable collection of documents with unique ids. Copies share
/// the underlying storage.
class Corpus {
 public:
  Corpus() : docs_(std::make_shared<const std::vector<Document>>()) {}

  explicit Corpus(std::vector<Document> docs, Provenance source = {})
      : docs_(std::make_shared<const std::vector<Document>>(std::move(docs))),
        source_(std::move(source)) {
    std::unordered_set<std::string_view> seen;
    for (const Document& d : *docs_) {
      if (!seen.insert(d.id()).second) throw InputError("duplicate document id '" + d.id() + "'");
    }
  }

  const std::vector<Document>& documents() const noexcept { return *docs_; }
  const Provenance& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return docs_->size(); }
  bool empty() const noexcept { return docs_->empty(); }
  const Document& operator[](std::size_t i) const { return (*docs_)[i]; }
  auto begin() const noexcept { return docs_->begin(); }
  auto end() const noexcept { return docs_->end(); }

  std::size_t token_count() const {
    std::size_t total = 0;
    for (const Document& d : *docs_) total += d.size();
    return total;
  }

  bool tagged() const {
    return !docs_->empty() &&
           std::all_of(docs_->begin(), docs_->end(), [](const Document& d) { return d.tags().has_value(); });
  }

 private:
  std::shared_ptr<const std::vector<Document>> docs_;
  Provenance source_;
};

/// Contiguous token (or tag) n-gram.
struct NGram {
  std::vector<std::string> items;

  std::size_t n() const noexcept { return items.size(); }
  friend auto operator<=>(const NGram&, const NGram&) = default;
  friend bool operator==(const NGram&, const NGram&) = default;
};

struct NGramHash {
  std::size_t operator()(const NGram& g) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (const std::string& s : g.items) {
      h ^= std::hash<std::string>{}(s) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// All |tokens| - n + 1 contiguous n-grams, multiplicity preserved.
inline std::vector<NGram> ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n < 1) throw PreconditionError("n-gram order must be >= 1");
  std::vector<NGram> out;
  if (tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    out.push_back(NGram{{tokens.begin() + static_cast<std::ptrdiff_t>(i),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i + n)}});
  }
  return out;
}

/// Document texts joined by a single newline (no trailing newline).
inline std::string concat(const Corpus& corpus) {
  if (corpus.empty()) throw PreconditionError("concat requires a non-empty corpus");
  std::size_t bytes = corpus.size() - 1;
  for (const Document& d : corpus) bytes += d.text().size();
  std::string out;
  out.reserve(bytes);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) out += '\n';
    out += corpus[i].text();
  }
  return out;
}

/// Mean token count per document.
inline double avg_length(const Corpus& corpus) {
  if (corpus.empty()) throw PreconditionError("avg_length requires a non-empty corpus");
  return static_cast<double>(corpus.token_count()) / static_cast<double>(corpus.size());
}

/// Split "token/TAG token/TAG ..." at the last slash of each item.
inline std::pair<std::vector<std::string>, std::vector<std::string>> parse_pretagged(
    std::string_view line, std::size_t line_no = 0) {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    const std::string_view item = line.substr(i, j - i);
    const std::size_t slash = item.rfind('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == item.size()) {
      throw ParseError(line_no, "expected token/TAG, got '" + std::string(item) + "'");
    }
    const std::string_view tag = item.substr(slash + 1);
    if (!is_known_tag(tag)) throw ParseError(line_no, "unknown tag '" + std::string(tag) + "'");
    tokens.emplace_back(item.substr(0, slash));
    tags.emplace_back(tag);
    i = j;
  }
  return {std::move(tokens), std::move(tags)};
}

struct LoadOptions {
  Format format = Format::Lines;
  std::string field = "text";
  std::string id_field = "id";
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180: quoted fields may hold commas, newlines and doubled quotes.
inline std::vector<CsvRecord> parse_csv(std::string_view content) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < content.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < content.size() && content[i] == '"') {
        ++i;
        for (;;) {
          if (i >= content.size()) throw ParseError(rec.line, "unterminated quoted CSV field");
          const char c = content[i++];
          if (c == '"') {
            if (i < content.size() && content[i] == '"') {
              field += '"';
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field += c;
          }
        }
        if (i < content.size() && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          throw ParseError(line, "unexpected character after closing quote");
        }
      } else {
        while (i < content.size() && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          if (content[i] == '"') throw ParseError(line, "stray quote in unquoted CSV field");
          field += content[i++];
        }
      }
      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= content.size()) {
        done = true;
      } else if (content[i] == ',') {
        ++i;
      } else {
        if (content[i] == '\r') ++i;
        if (i < content.size() && content[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    const bool empty_row = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!empty_row) records.push_back(std::move(rec));
  }
  return records;
}

inline std::string json_id(const nlohmann::json& value, std::size_t line) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
  throw ParseError(line, "id must be a string or an integer");
}

}  // namespace detail

/// Parse corpus content already held in memory.
inline Corpus parse_corpus(std::string_view content, const LoadOptions& options,
                           const std::string& source_name = "<memory>") {
  if (content.size() >= 3 && static_cast<unsigned char>(content[0]) == 0xEF &&
      static_cast<unsigned char>(content[1]) == 0xBB && static_cast<unsigned char>(content[2]) == 0xBF) {
    content.remove_prefix(3);
  }
  if (!is_valid_utf8(content)) {
    const auto lines = detail::split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (!is_valid_utf8(lines[i])) throw ParseError(i + 1, "input is not valid UTF-8");
    }
    throw InputError(source_name + ": input is not valid UTF-8");
  }

  std::vector<Document> docs;
  switch (options.format) {
    case Format::Lines: {
      for (std::string_view line : detail::split_lines(content)) {
        docs.emplace_back(std::to_string(docs.size()), std::string(line));
      }
      break;
    }
    case Format::Pretagged: {
      const auto lines = detail::split_lines(content);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        auto [tokens, tags] = parse_pretagged(lines[i], i + 1);
        docs.push_back(Document::from_tagged(std::to_string(docs.size()), std::move(tokens), std::move(tags)));
      }
      break;
    }
    case Format::Jsonl: {
      const auto lines = detail::split_lines(content);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (detail::blank(lines[i])) continue;
        const std::size_t line_no = i + 1;
        nlohmann::json record;
        try {
          record = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) throw ParseError(line_no, "expected a JSON object");
        const auto text = record.find(options.field);
        if (text == record.end()) throw MissingFieldError(options.field, line_no);
        if (!text->is_string()) throw ParseError(line_no, "field '" + options.field + "' is not a string");
        const auto id = record.find(options.id_field);
        std::string doc_id = id != record.end() ? detail::json_id(*id, line_no) : std::to_string(docs.size());
        docs.emplace_back(std::move(doc_id), text->get<std::string>());
      }
      break;
    }
    case Format::Csv: {
      auto records = detail::parse_csv(content);
      if (records.empty()) throw InputError(source_name + ": CSV has no header row");
      const auto& header = records.front().fields;
      const auto text_col = std::find(header.begin(), header.end(), options.field);
      if (text_col == header.end()) throw MissingFieldError(options.field, 1);
      const auto id_col = std::find(header.begin(), header.end(), options.id_field);
      const auto text_index = static_cast<std::size_t>(text_col - header.begin());
      for (std::size_t r = 1; r < records.size(); ++r) {
        auto& rec = records[r];
        if (rec.fields.size() != header.size()) {
          throw ParseError(rec.line, "expected " + std::to_string(header.size()) + " fields, got " +
                                         std::to_string(rec.fields.size()));
        }
        std::string doc_id = id_col != header.end()
                                 ? rec.fields[static_cast<std::size_t>(id_col - header.begin())]
                                 : std::to_string(docs.size());
        docs.emplace_back(std::move(doc_id), std::move(rec.fields[text_index]));
      }
      break;
    }
  }

  if (docs.empty()) throw InputError(source_name + ": corpus has no documents");
  if (std::all_of(docs.begin(), docs.end(), [](const Document& d) { return d.text().empty(); })) {
    throw InputError(source_name + ": every document is empty");
  }
  const bool keyed = options.format == Format::Jsonl || options.format == Format::Csv;
  return Corpus(std::move(docs), Provenance{source_name, std::string(format_name(options.format)),
                                            keyed ? options.field : std::string(),
                                            keyed ? "id_field=" + options.id_field : std::string()});
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("error while reading '" + path.string() + "'");
  return std::move(buffer).str();
}

/// Load one document per line (lines/pretagged) or per record (jsonl/csv).
/// Ids are zero-based record indices unless the record has an explicit id.
inline Corpus load_corpus(const std::filesystem::path& path, Format format,
                          std::optional<std::string> field = std::nullopt) {
  LoadOptions options;
  options.format = format;
  if (field) options.field = *field;
  return parse_corpus(read_file(path), options, path.string());
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, format_from_path(path));
}

/// Build a corpus from raw strings; ids are "0", "1", ...
inline Corpus make_corpus(std::span<const std::string> texts, std::string source = "<memory>") {
  std::vector<Document> docs;
  docs.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) docs.emplace_back(std::to_string(i), texts[i]);
  return Corpus(std::move(docs), Provenance{std::move(source), "lines", "", ""});
}

inline Corpus make_corpus(std::initializer_list<std::string> texts) {
  return make_corpus(std::span<const std::string>(texts.begin(), texts.size()));
}

}  // namespace textdiv
