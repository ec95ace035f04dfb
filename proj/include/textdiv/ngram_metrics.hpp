#pragma once

// Token/type family scores: n-gram diversity, MATTR, HD-D and self-repetition.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "textdiv/corpus.hpp"
#include "textdiv/detail/interned.hpp"
#include "textdiv/error.hpp"

namespace textdiv {

/// How n-grams and windows treat document boundaries.
///   PerDocument  - computed inside each document, then pooled (default).
///   Concatenated - computed over the single concatenated token stream, so
///                  n-grams and windows may straddle two documents.
enum class Boundary { PerDocument, Concatenated };

struct NgdParams {
  std::size_t max_n = 4;
  bool lowercase = false;
  Boundary boundary = Boundary::PerDocument;
};

struct MattrParams {
  std::size_t window = 50;
  bool lowercase = false;
  Boundary boundary = Boundary::PerDocument;
};

struct HddParams {
  std::size_t sample = 42;
  bool lowercase = false;
};

struct SelfRepetitionParams {
  std::size_t n = 4;
  bool per_document = false;
  bool lowercase = false;
};

struct SelfRepetitionResult {
  double score = 0.0;
  std::vector<double> per_document;  // filled when requested
};

namespace detail {

inline std::vector<std::u32string> streams_for(const InternedCorpus& ids, Boundary boundary) {
  if (boundary == Boundary::Concatenated) return {ids.joined()};
  return ids.docs;
}

inline double ngram_diversity(std::span<const std::u32string> streams, std::size_t max_n) {
  if (max_n < 1) throw PreconditionError("max_n must be >= 1");
  double score = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::unordered_set<std::u32string_view> unique;
    std::size_t total = 0;
    for (const std::u32string& s : streams) {
      const std::u32string_view view(s);
      for (std::size_t i = 0; i + n <= view.size(); ++i) {
        unique.insert(view.substr(i, n));
        ++total;
      }
    }
    if (total == 0) {
      throw PreconditionError("corpus too short: no " + std::to_string(n) + "-grams available");
    }
    score += static_cast<double>(unique.size()) / static_cast<double>(total);
  }
  return score;
}

// Adds the TTR of every stride-1 window of `stream` to `sum`. A stream shorter
// than the window counts as one window holding the whole stream.
inline void accumulate_window_ttrs(std::u32string_view stream, std::size_t window, std::size_t vocabulary,
                                   std::vector<std::uint32_t>& counts, double& sum, std::size_t& windows) {
  if (stream.empty()) return;
  counts.assign(vocabulary, 0);
  if (stream.size() <= window) {
    std::size_t distinct = 0;
    for (char32_t t : stream) distinct += counts[t]++ == 0;
    sum += static_cast<double>(distinct) / static_cast<double>(stream.size());
    ++windows;
    return;
  }
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < window; ++i) distinct += counts[stream[i]]++ == 0;
  sum += static_cast<double>(distinct) / static_cast<double>(window);
  ++windows;
  for (std::size_t i = window; i < stream.size(); ++i) {
    distinct -= --counts[stream[i - window]] == 0;
    distinct += counts[stream[i]]++ == 0;
    sum += static_cast<double>(distinct) / static_cast<double>(window);
    ++windows;
  }
}

inline double mattr(std::span<const std::u32string> streams, std::size_t window, std::size_t vocabulary) {
  if (window < 1) throw PreconditionError("MATTR window must be >= 1");
  std::vector<std::uint32_t> counts;
  double sum = 0.0;
  std::size_t windows = 0;
  for (const std::u32string& s : streams) accumulate_window_ttrs(s, window, vocabulary, counts, sum, windows);
  if (windows == 0) throw PreconditionError("MATTR requires at least one token");
  return sum / static_cast<double>(windows);
}

// P[type with `k` occurrences is absent from a `sample`-draw without
// replacement out of `total`] = C(total-k, sample) / C(total, sample),
// evaluated as a product of ratios in log space.
inline double probability_absent(std::size_t total, std::size_t k, std::size_t sample) {
  if (total - k < sample) return 0.0;
  double log_p = 0.0;
  for (std::size_t i = 0; i < sample; ++i) {
    log_p += std::log1p(-static_cast<double>(k) / static_cast<double>(total - i));
  }
  return std::exp(log_p);
}

inline double hdd_from_counts(std::span<const std::size_t> type_counts, std::size_t total, std::size_t sample) {
  if (sample < 1) throw PreconditionError("HD-D sample size must be >= 1");
  if (total < sample) {
    throw PreconditionError("HD-D needs at least " + std::to_string(sample) + " tokens, corpus has " +
                            std::to_string(total));
  }
  double score = 0.0;
  for (std::size_t k : type_counts) {
    score += (1.0 - probability_absent(total, k, sample)) / static_cast<double>(sample);
  }
  return score;
}

inline SelfRepetitionResult self_repetition(std::span<const std::u32string> docs, const SelfRepetitionParams& params) {
  if (params.n < 1) throw PreconditionError("self-repetition n must be >= 1");
  if (docs.size() < 2) throw PreconditionError("self-repetition needs at least 2 documents");

  struct Presence {
    std::uint32_t doc_count = 0;
    std::uint32_t last_doc = 0;  // 1-based index of the last document that touched this n-gram
  };
  std::unordered_map<std::u32string_view, Presence> presence;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::u32string_view view(docs[d]);
    for (std::size_t i = 0; i + params.n <= view.size(); ++i) {
      Presence& p = presence[view.substr(i, params.n)];
      if (p.last_doc != d + 1) {
        ++p.doc_count;
        p.last_doc = static_cast<std::uint32_t>(d + 1);
      }
    }
  }

  SelfRepetitionResult result;
  double total = 0.0;
  for (const std::u32string& doc : docs) {
    const std::u32string_view view(doc);
    std::uint64_t shared = 0;
    for (std::size_t i = 0; i + params.n <= view.size(); ++i) {
      shared += presence.find(view.substr(i, params.n))->second.doc_count - 1;
    }
    const double srs = std::log(static_cast<double>(shared) + 1.0);
    total += srs;
    if (params.per_document) result.per_document.push_back(srs);
  }
  result.score = total / static_cast<double>(docs.size());
  return result;
}

}  // namespace detail

/// Sum over n = 1..max_n of unique/total n-gram counts.
inline double ngram_diversity(const Corpus& corpus, const NgdParams& params = {}) {
  const auto ids = detail::intern_tokens(corpus, params.lowercase);
  const auto streams = detail::streams_for(ids, params.boundary);
  return detail::ngram_diversity(streams, params.max_n);
}

/// Moving-average type-token ratio over stride-1 windows.
inline double mattr(const Corpus& corpus, const MattrParams& params = {}) {
  const auto ids = detail::intern_tokens(corpus, params.lowercase);
  const auto streams = detail::streams_for(ids, params.boundary);
  return detail::mattr(streams, params.window, ids.vocabulary);
}

inline double mattr(std::span<const std::string> tokens, std::size_t window) {
  const std::vector<std::string> seq(tokens.begin(), tokens.end());
  const auto ids = detail::intern_sequences(std::span(&seq, 1));
  return detail::mattr(ids.docs, window, ids.vocabulary);
}

/// Hypergeometric diversity (McCarthy & Jarvis): expected TTR of a random
/// `sample`-token draw without replacement from the pooled token stream.
inline double hdd(std::span<const std::string> tokens, std::size_t sample = 42) {
  std::unordered_map<std::string_view, std::size_t> counts;
  for (const std::string& t : tokens) ++counts[t];
  std::vector<std::size_t> type_counts;
  type_counts.reserve(counts.size());
  for (const auto& [type, count] : counts) type_counts.push_back(count);
  return detail::hdd_from_counts(type_counts, tokens.size(), sample);
}

inline double hdd(const Corpus& corpus, const HddParams& params = {}) {
  const auto ids = detail::intern_tokens(corpus, params.lowercase);
  std::vector<std::size_t> type_counts(ids.vocabulary, 0);
  for (const auto& doc : ids.docs) {
    for (char32_t t : doc) ++type_counts[t];
  }
  return detail::hdd_from_counts(type_counts, ids.token_count(), params.sample);
}

/// Mean over documents of SRS(d) = ln(sum_i N_i + 1), where i runs over every
/// positional n-gram of d and N_i counts the other documents containing it.
inline SelfRepetitionResult self_repetition(const Corpus& corpus, const SelfRepetitionParams& params = {}) {
  const auto ids = detail::intern_tokens(corpus, params.lowercase);
  return detail::self_repetition(ids.docs, params);
}

}  // namespace textdiv
