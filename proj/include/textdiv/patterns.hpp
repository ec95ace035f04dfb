#pragma once

// Recurring POS templates and verbatim repeated strings across documents.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "textdiv/corpus.hpp"
#include "textdiv/detail/interned.hpp"
#include "textdiv/error.hpp"
#include "textdiv/pos_tagger.hpp"

namespace textdiv {

/// Tokens [start, end) of document `doc`, with their source text.
struct Occurrence {
  std::string doc;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct PatternEntry {
  std::vector<std::string> pattern;  // tags (POS index) or tokens (exact-match index)
  std::size_t doc_count = 0;
  std::vector<Occurrence> occurrences;

  std::size_t frequency() const noexcept { return occurrences.size(); }
  friend bool operator==(const PatternEntry&, const PatternEntry&) = default;
};

struct PatternIndex {
  std::size_t n = 4;
  std::size_t top_n = 100;
  std::size_t min_docs = 3;
  std::string tagger;
  std::vector<PatternEntry> patterns;

  const PatternEntry* find(std::span<const std::string> pattern) const {
    for (const PatternEntry& e : patterns) {
      if (std::equal(e.pattern.begin(), e.pattern.end(), pattern.begin(), pattern.end())) return &e;
    }
    return nullptr;
  }
};

struct ExactMatchIndex {
  std::size_t n = 3;
  std::size_t min_docs = 2;
  bool lowercase = false;
  std::vector<PatternEntry> patterns;
};

struct PatternOptions {
  std::size_t n = 4;
  std::size_t top_n = 100;
  std::size_t min_docs = 3;  // "more than 2 texts"
};

struct PatternMatch {
  std::vector<std::string> pattern;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
};

inline constexpr std::size_t kUiMinLength = 2;
inline constexpr std::size_t kUiMaxLength = 10;

/// The exploration UI only offers lengths in [2, 10].
inline void check_ui_bounds(std::size_t value, std::string_view what) {
  if (value < kUiMinLength || value > kUiMaxLength) {
    throw PreconditionError(std::string(what) + " must be in [2, 10], got " + std::to_string(value));
  }
}

inline std::string join(std::span<const std::string> items, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

namespace detail {

struct GramStats {
  std::size_t frequency = 0;
  std::size_t doc_count = 0;
  std::size_t last_doc = 0;  // 1-based
};

// Counts every positional n-gram of `streams` by frequency and document count.
inline std::unordered_map<std::u32string_view, GramStats> count_grams(const std::vector<std::u32string>& streams,
                                                                      std::size_t n) {
  std::unordered_map<std::u32string_view, GramStats> stats;
  for (std::size_t d = 0; d < streams.size(); ++d) {
    const std::u32string_view s(streams[d]);
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      GramStats& g = stats[s.substr(i, n)];
      ++g.frequency;
      if (g.last_doc != d + 1) {
        ++g.doc_count;
        g.last_doc = d + 1;
      }
    }
  }
  return stats;
}

struct Candidate {
  std::u32string_view gram;
  GramStats stats;
  std::vector<std::string> items;
  std::string key;
};

inline std::vector<std::string> items_of(const std::vector<std::u32string>& streams,
                                         const std::vector<std::vector<std::string>>& source,
                                         std::u32string_view gram) {
  // Locate the gram inside its owning stream to recover its surface items.
  for (std::size_t d = 0; d < streams.size(); ++d) {
    const std::u32string_view s(streams[d]);
    if (gram.data() >= s.data() && gram.data() < s.data() + s.size()) {
      const auto offset = static_cast<std::size_t>(gram.data() - s.data());
      return {source[d].begin() + static_cast<std::ptrdiff_t>(offset),
              source[d].begin() + static_cast<std::ptrdiff_t>(offset + gram.size())};
    }
  }
  return {};
}

// Fills occurrences for `entries` (keyed by gram) in document then position order.
inline void collect_occurrences(const Corpus& corpus, const std::vector<std::u32string>& streams, std::size_t n,
                                const std::unordered_map<std::u32string_view, std::size_t>& wanted,
                                std::vector<PatternEntry>& entries) {
  for (std::size_t d = 0; d < streams.size(); ++d) {
    const std::u32string_view s(streams[d]);
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      const auto it = wanted.find(s.substr(i, n));
      if (it == wanted.end()) continue;
      entries[it->second].occurrences.push_back(
          Occurrence{corpus[d].id(), i, i + n, std::string(corpus[d].surface(i, i + n))});
    }
  }
}

inline std::vector<PatternEntry> build_entries(const Corpus& corpus, const std::vector<std::vector<std::string>>& items,
                                               std::size_t n, std::size_t min_docs,
                                               std::size_t limit, bool rank_by_docs) {
  const InternedCorpus ids = intern_sequences(items);
  const auto stats = count_grams(ids.docs, n);

  std::vector<Candidate> candidates;
  for (const auto& [gram, g] : stats) {
    if (g.doc_count < min_docs) continue;
    Candidate c{gram, g, items_of(ids.docs, items, gram), {}};
    c.key = join(c.items);
    candidates.push_back(std::move(c));
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (rank_by_docs && a.stats.doc_count != b.stats.doc_count) return a.stats.doc_count > b.stats.doc_count;
    if (a.stats.frequency != b.stats.frequency) return a.stats.frequency > b.stats.frequency;
    return a.key < b.key;
  });
  if (candidates.size() > limit) candidates.resize(limit);

  std::vector<PatternEntry> entries;
  std::unordered_map<std::u32string_view, std::size_t> wanted;
  for (Candidate& c : candidates) {
    wanted.emplace(c.gram, entries.size());
    entries.push_back(PatternEntry{std::move(c.items), c.stats.doc_count, {}});
    entries.back().occurrences.reserve(c.stats.frequency);
  }
  collect_occurrences(corpus, ids.docs, n, wanted, entries);
  return entries;
}

}  // namespace detail

/// Top `top_n` POS n-grams by total occurrence count among those present in
/// at least `min_docs` documents. Ties go to the lexicographically smaller
/// pattern string.
inline PatternIndex extract_patterns(const Corpus& corpus, const Tagger& tagger, const PatternOptions& options = {}) {
  if (options.n < 1) throw PreconditionError("pattern length must be >= 1");
  if (options.min_docs < 1) throw PreconditionError("min_docs must be >= 1");
  std::vector<std::vector<std::string>> tags;
  tags.reserve(corpus.size());
  for (const Document& doc : corpus) tags.push_back(tags_for(doc, tagger));

  PatternIndex index;
  index.n = options.n;
  index.top_n = options.top_n;
  index.min_docs = options.min_docs;
  index.tagger = tagger.id();
  index.patterns = detail::build_entries(corpus, tags, options.n, options.min_docs, options.top_n, false);
  return index;
}

/// Every positional tag n-gram of `doc` equal to a retained pattern, left to
/// right, overlaps included.
inline std::vector<PatternMatch> match_patterns(const Document& doc, const PatternIndex& index, const Tagger& tagger) {
  if (!index.tagger.empty() && index.tagger != tagger.id()) {
    throw TaggerError("index was built with tagger '" + index.tagger + "' but matching uses '" + tagger.id() + "'");
  }
  const std::vector<std::string> tags = tags_for(doc, tagger);
  std::unordered_map<std::string, const PatternEntry*> lookup;
  for (const PatternEntry& e : index.patterns) lookup.emplace(join(e.pattern), &e);

  std::vector<PatternMatch> matches;
  const std::size_t n = index.n;
  for (std::size_t i = 0; i + n <= tags.size(); ++i) {
    const auto it = lookup.find(join(std::span(tags).subspan(i, n)));
    if (it == lookup.end()) continue;
    matches.push_back(PatternMatch{it->second->pattern, i, i + n, std::string(doc.surface(i, i + n))});
  }
  return matches;
}

/// Token n-grams present in at least `min_docs` documents, every occurrence
/// located; sorted by document count, then frequency, then pattern string.
inline ExactMatchIndex exact_matches(const Corpus& corpus, std::size_t n, std::size_t min_docs = 2,
                                     bool lowercase = false) {
  if (n < 1) throw PreconditionError("string length must be >= 1");
  if (min_docs < 2) throw PreconditionError("min_docs must be >= 2");
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(corpus.size());
  for (const Document& doc : corpus) {
    if (!lowercase) {
      tokens.push_back(doc.tokens());
      continue;
    }
    std::vector<std::string> folded;
    folded.reserve(doc.size());
    for (const std::string& t : doc.tokens()) folded.push_back(to_lower(t));
    tokens.push_back(std::move(folded));
  }
  ExactMatchIndex index;
  index.n = n;
  index.min_docs = min_docs;
  index.lowercase = lowercase;
  index.patterns = detail::build_entries(corpus, tokens, n, min_docs, static_cast<std::size_t>(-1), true);
  return index;
}

// JSON form shared by both index types:
// {n, min_docs, patterns: [{pattern, doc_count, occurrences: [{doc, start, end, text}]}]}

inline nlohmann::json entries_to_json(const std::vector<PatternEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const PatternEntry& e : entries) {
    nlohmann::json occ = nlohmann::json::array();
    for (const Occurrence& o : e.occurrences) {
      occ.push_back({{"doc", o.doc}, {"start", o.start}, {"end", o.end}, {"text", o.text}});
    }
    out.push_back({{"pattern", e.pattern}, {"doc_count", e.doc_count}, {"occurrences", std::move(occ)}});
  }
  return out;
}

inline std::vector<PatternEntry> entries_from_json(const nlohmann::json& j) {
  std::vector<PatternEntry> entries;
  for (const auto& e : j.at("patterns")) {
    PatternEntry entry;
    entry.pattern = e.at("pattern").get<std::vector<std::string>>();
    entry.doc_count = e.at("doc_count").get<std::size_t>();
    for (const auto& o : e.at("occurrences")) {
      entry.occurrences.push_back(Occurrence{o.at("doc").get<std::string>(), o.at("start").get<std::size_t>(),
                                             o.at("end").get<std::size_t>(), o.at("text").get<std::string>()});
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

inline nlohmann::json to_json(const PatternIndex& index) {
  return {{"kind", "pos"},         {"n", index.n},           {"top_n", index.top_n},
          {"min_docs", index.min_docs}, {"tagger", index.tagger}, {"patterns", entries_to_json(index.patterns)}};
}

inline nlohmann::json to_json(const ExactMatchIndex& index) {
  return {{"kind", "exact"},
          {"n", index.n},
          {"min_docs", index.min_docs},
          {"lowercase", index.lowercase},
          {"patterns", entries_to_json(index.patterns)}};
}

inline PatternIndex pattern_index_from_json(const nlohmann::json& j) {
  try {
    PatternIndex index;
    index.n = j.at("n").get<std::size_t>();
    index.min_docs = j.at("min_docs").get<std::size_t>();
    index.top_n = j.value("top_n", std::size_t{100});
    index.tagger = j.value("tagger", std::string());
    index.patterns = entries_from_json(j);
    for (const PatternEntry& e : index.patterns) {
      if (e.pattern.size() != index.n) throw InputError("pattern length does not match n");
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed pattern index: ") + e.what());
  }
}

}  // namespace textdiv
