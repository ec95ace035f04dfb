#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "textdiv/corpus.hpp"
#include "textdiv/data/builtin_lexicon_v1.hpp"
#include "textdiv/error.hpp"
#include "textdiv/tagset.hpp"
#include "textdiv/tokenizer.hpp"

namespace textdiv {

/// Produces one Penn Treebank tag per token.
class Tagger {
 public:
  virtual ~Tagger() = default;

  /// Stable identifier recorded in pattern indexes ("builtin:v1", ...).
  virtual std::string id() const = 0;

  virtual std::vector<std::string> tag(std::span<const std::string> tokens) const = 0;
};

/// How to obtain tags for a run.
struct TaggerSpec {
  enum class Kind { Builtin, Pretagged, External };

  Kind kind = Kind::Builtin;
  std::filesystem::path lexicon_path;  // builtin: alternative data file
  std::string command;                 // external: subprocess speaking NDJSON on stdin/stdout
  std::string endpoint;                // external: HTTP URL taking {id, tokens} -> {id, tags}
  bool concurrency_safe = false;       // external HTTP endpoint may be called concurrently
};

inline std::string_view kind_name(TaggerSpec::Kind kind) {
  switch (kind) {
    case TaggerSpec::Kind::Builtin: return "builtin";
    case TaggerSpec::Kind::Pretagged: return "pretagged";
    case TaggerSpec::Kind::External: return "external";
  }
  return "builtin";
}

/// Lexicon plus ordered fallback rules; see data/builtin_lexicon_v1.hpp.
class TaggerModel {
 public:
  struct Rule {
    enum class Kind { Number, Symbol, Capitalized, Hyphenated, Suffix };
    Kind kind = Kind::Suffix;
    std::string suffix;
    std::string tag;
    std::size_t min_length = 0;
    std::vector<std::string> prev;
  };

  static TaggerModel parse(std::string_view data, const std::string& source = "builtin") {
    TaggerModel model;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= data.size()) {
      std::size_t end = data.find('\n', pos);
      if (end == std::string_view::npos) end = data.size();
      std::string_view line = data.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      std::istringstream in{std::string(line)};
      std::vector<std::string> fields;
      for (std::string f; in >> f;) fields.push_back(f);
      if (fields.empty() || fields[0].starts_with('#')) continue;

      auto fail = [&](const std::string& why) {
        return TaggerError(source + " line " + std::to_string(line_no) + ": " + why);
      };
      auto check_tag = [&](const std::string& tag) {
        if (!is_known_tag(tag)) throw fail("unknown tag '" + tag + "'");
        return tag;
      };

      const std::string& directive = fields[0];
      if (directive == "version" && fields.size() == 2) {
        model.version_ = fields[1];
      } else if (directive == "word" && fields.size() == 3) {
        model.lexicon_[fields[1]] = check_tag(fields[2]);
      } else if (directive == "default" && fields.size() == 2) {
        model.fallback_ = check_tag(fields[1]);
      } else if (directive == "rule" && fields.size() >= 3) {
        Rule rule;
        std::size_t next = 2;
        const std::string& kind = fields[1];
        if (kind == "number") rule.kind = Rule::Kind::Number;
        else if (kind == "symbol") rule.kind = Rule::Kind::Symbol;
        else if (kind == "capitalized") rule.kind = Rule::Kind::Capitalized;
        else if (kind == "hyphenated") rule.kind = Rule::Kind::Hyphenated;
        else if (kind == "suffix" && fields.size() >= 4) {
          rule.kind = Rule::Kind::Suffix;
          rule.suffix = fields[2];
          next = 3;
        } else {
          throw fail("bad rule '" + std::string(line) + "'");
        }
        rule.tag = check_tag(fields[next++]);
        for (; next < fields.size(); ++next) {
          const std::string& opt = fields[next];
          if (opt.starts_with("min=")) {
            rule.min_length = std::stoul(opt.substr(4));
          } else if (opt.starts_with("prev=")) {
            std::string_view list = std::string_view(opt).substr(5);
            while (!list.empty()) {
              const auto comma = list.find(',');
              rule.prev.push_back(check_tag(std::string(list.substr(0, comma))));
              list = comma == std::string_view::npos ? std::string_view() : list.substr(comma + 1);
            }
          } else {
            throw fail("unknown rule option '" + opt + "'");
          }
        }
        model.rules_.push_back(std::move(rule));
      } else {
        throw fail("cannot parse '" + std::string(line) + "'");
      }
    }
    if (model.version_.empty()) throw TaggerError(source + ": missing version line");
    return model;
  }

  const std::string& version() const noexcept { return version_; }
  const std::string& fallback() const noexcept { return fallback_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }

  const std::string* lookup(const std::string& form) const {
    const auto it = lexicon_.find(form);
    return it == lexicon_.end() ? nullptr : &it->second;
  }

 private:
  std::string version_;
  std::string fallback_ = "NN";
  std::unordered_map<std::string, std::string> lexicon_;
  std::vector<Rule> rules_;
};

namespace detail {

inline std::size_t code_points(std::string_view s) { return code_point_offset(s, s.size()); }

inline UChar32 first_code_point(std::string_view s) {
  if (s.empty()) return -1;
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = 0;
  UChar32 c;
  U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
  return c;
}

template <class Pred>
bool any_code_point(std::string_view s, Pred pred) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  for (int32_t i = 0; i < n;) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c >= 0 && pred(c)) return true;
  }
  return false;
}

inline bool looks_numeric(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') digit = true;
    else if (c != '.' && c != ',' && c != ':' && c != '/' && c != '-') return false;
  }
  return digit;
}

inline bool hyphenated(std::string_view s) {
  const auto dash = s.find('-');
  return dash != std::string_view::npos && dash > 0 && dash + 1 < s.size();
}

// Lexicon key: lowercase with typographic apostrophes folded to ASCII.
inline std::string lookup_form(std::string_view token) {
  std::string lower = to_lower(token);
  std::string out;
  out.reserve(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower.compare(i, 3, "\xE2\x80\x99") == 0) {
      out += '\'';
      i += 2;
    } else {
      out += lower[i];
    }
  }
  return out;
}

}  // namespace detail

/// Deterministic lexicon + suffix-rule tagger. Pure and thread-safe.
class BuiltinTagger final : public Tagger {
 public:
  BuiltinTagger() : model_(std::make_shared<const TaggerModel>(default_model())) {}
  explicit BuiltinTagger(TaggerModel model) : model_(std::make_shared<const TaggerModel>(std::move(model))) {}

  static BuiltinTagger from_file(const std::filesystem::path& path) {
    return BuiltinTagger(TaggerModel::parse(read_file(path), path.string()));
  }

  static const TaggerModel& default_model() {
    static const TaggerModel model = TaggerModel::parse(data::kBuiltinLexiconV1);
    return model;
  }

  std::string id() const override { return "builtin:v" + model_->version(); }

  std::vector<std::string> tag(std::span<const std::string> tokens) const override {
    std::vector<std::string> tags;
    tags.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const bool sentence_initial = i == 0 || tags.back() == ".";
      tags.push_back(tag_one(tokens[i], sentence_initial, i == 0 ? std::string_view() : tags.back()));
    }
    return tags;
  }

 private:
  std::string tag_one(const std::string& token, bool sentence_initial, std::string_view prev) const {
    const std::string form = detail::lookup_form(token);
    if (const std::string* tag = model_->lookup(form)) return *tag;

    // Sentence openers are matched in lowercase so they are not all proper nouns.
    const std::string& shape = sentence_initial ? form : token;
    const std::size_t length = detail::code_points(form);
    for (const auto& rule : model_->rules()) {
      if (length < rule.min_length) continue;
      if (!rule.prev.empty() && std::find(rule.prev.begin(), rule.prev.end(), prev) == rule.prev.end()) continue;
      bool hit = false;
      switch (rule.kind) {
        case TaggerModel::Rule::Kind::Number:
          hit = detail::looks_numeric(token);
          break;
        case TaggerModel::Rule::Kind::Symbol:
          hit = !detail::any_code_point(token, [](UChar32 c) { return u_isalnum(c) != 0; });
          break;
        case TaggerModel::Rule::Kind::Capitalized:
          hit = u_isupper(detail::first_code_point(shape)) != 0;
          break;
        case TaggerModel::Rule::Kind::Hyphenated:
          hit = detail::hyphenated(token);
          break;
        case TaggerModel::Rule::Kind::Suffix:
          hit = form.size() > rule.suffix.size() && form.ends_with(rule.suffix);
          break;
      }
      if (hit) return rule.tag;
    }
    return model_->fallback();
  }

  std::shared_ptr<const TaggerModel> model_;
};

/// Reads tags from "token/TAG" items instead of inferring them.
class PretaggedTagger final : public Tagger {
 public:
  std::string id() const override { return "pretagged"; }

  std::vector<std::string> tag(std::span<const std::string> items) const override {
    std::vector<std::string> tags;
    tags.reserve(items.size());
    for (const std::string& item : items) {
      const auto slash = item.rfind('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) {
        throw TaggerError("pretagged item '" + item + "' is not token/TAG");
      }
      std::string tag = item.substr(slash + 1);
      if (!is_known_tag(tag)) throw TaggerError("unknown tag '" + tag + "'");
      tags.push_back(std::move(tag));
    }
    return tags;
  }
};

/// Tags for a document: its own tags when it carries them, otherwise the
/// tagger's output (validated against the tagset).
inline std::vector<std::string> tags_for(const Document& doc, const Tagger& tagger) {
  if (doc.tags()) return *doc.tags();
  if (dynamic_cast<const PretaggedTagger*>(&tagger) != nullptr) {
    throw TaggerError("document '" + doc.id() + "' carries no tags for the pretagged tagger");
  }
  std::vector<std::string> tags = tagger.tag(doc.tokens());
  if (tags.size() != doc.size()) {
    throw TaggerError("tagger " + tagger.id() + " returned " + std::to_string(tags.size()) + " tags for " +
                      std::to_string(doc.size()) + " tokens in document '" + doc.id() + "'");
  }
  for (const std::string& t : tags) {
    if (!is_known_tag(t)) throw TaggerError("tagger " + tagger.id() + " emitted unknown tag '" + t + "'");
  }
  return tags;
}

/// New corpus whose documents all carry tags.
inline Corpus tag_corpus(const Corpus& corpus, const Tagger& tagger) {
  if (corpus.tagged()) return corpus;
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (const Document& doc : corpus) docs.push_back(doc.with_tags(tags_for(doc, tagger)));
  return Corpus(std::move(docs), corpus.source());
}

}  // namespace textdiv
