#pragma once

// Pairwise text similarity: sentence BLEU (single reference, epsilon
// smoothing) and ROUGE-L. The generic templates work on any random-access
// sequence of comparable items; the profile-based BLEU is the fast path used
// for all-pairs evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "textdiv/corpus.hpp"
#include "textdiv/detail/interned.hpp"

namespace textdiv {

struct BleuParams {
  std::size_t max_order = 4;
  double epsilon = 1e-9;  // replaces a zero modified precision
};

namespace detail {

// Geometric mean of the precisions times the brevity penalty. The effective
// order is min(max_order, |hyp|).
template <class MatchFn>
double bleu_score(std::size_t hyp_len, std::size_t ref_len, const BleuParams& params, MatchFn&& matches) {
  if (hyp_len == 0 || params.max_order == 0) return 0.0;
  const std::size_t order = std::min(params.max_order, hyp_len);
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    const std::size_t total = hyp_len - n + 1;
    const std::size_t matched = matches(n);
    const double p = matched == 0 ? params.epsilon : static_cast<double>(matched) / static_cast<double>(total);
    log_sum += std::log(p);
  }
  const double brevity =
      hyp_len > ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return std::exp(log_sum / static_cast<double>(order)) * brevity;
}

}  // namespace detail

/// BLEU of `hyp` against the single reference `ref`.
template <class Seq>
double bleu(const Seq& hyp, const Seq& ref, const BleuParams& params = {}) {
  using Item = std::decay_t<decltype(*std::begin(hyp))>;
  const std::size_t hyp_len = std::size(hyp);
  const std::size_t ref_len = std::size(ref);
  auto counts = [](const Seq& seq, std::size_t n) {
    std::map<std::vector<Item>, std::size_t> out;
    const std::size_t len = std::size(seq);
    for (std::size_t i = 0; i + n <= len; ++i) {
      ++out[std::vector<Item>(std::begin(seq) + static_cast<std::ptrdiff_t>(i),
                              std::begin(seq) + static_cast<std::ptrdiff_t>(i + n))];
    }
    return out;
  };
  return detail::bleu_score(hyp_len, ref_len, params, [&](std::size_t n) {
    const auto h = counts(hyp, n);
    const auto r = counts(ref, n);
    std::size_t matched = 0;
    for (const auto& [gram, c] : h) {
      const auto it = r.find(gram);
      if (it != r.end()) matched += std::min(c, it->second);
    }
    return matched;
  });
}

inline double bleu(const Document& hyp, const Document& ref, const BleuParams& params = {}) {
  return bleu(hyp.tokens(), ref.tokens(), params);
}

/// Length of the longest common subsequence, O(|a||b|) time, O(|b|) space.
template <class Seq>
std::size_t lcs_length(const Seq& a, const Seq& b) {
  const std::size_t m = std::size(b);
  std::vector<std::uint32_t> row(m + 1, 0);
  for (const auto& x : a) {
    std::uint32_t diag = 0;  // row[j-1] from the previous pass
    auto bj = std::begin(b);
    for (std::size_t j = 1; j <= m; ++j, ++bj) {
      const std::uint32_t up = row[j];
      row[j] = x == *bj ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[m];
}

/// LCS F-measure with P = LCS/|a|, R = LCS/|b|.
template <class Seq>
double rouge_l(const Seq& a, const Seq& b, double beta = 1.0) {
  const std::size_t lcs = lcs_length(a, b);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(std::size(a));
  const double r = static_cast<double>(lcs) / static_cast<double>(std::size(b));
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

inline double rouge_l(const Document& a, const Document& b, double beta = 1.0) {
  return rouge_l(a.tokens(), b.tokens(), beta);
}

namespace detail {

/// Per-document n-gram counts for n = 1..max_order, keyed by corpus-wide
/// n-gram ids and sorted so two profiles intersect by a linear merge.
class BleuProfiles {
 public:
  BleuProfiles(const InternedCorpus& ids, std::size_t max_order) : max_order_(max_order) {
    const std::size_t docs = ids.docs.size();
    counts_.assign(docs, std::vector<Counts>(max_order));
    lengths_.resize(docs);
    for (std::size_t n = 1; n <= max_order; ++n) {
      std::unordered_map<std::u32string_view, std::uint32_t> gram_ids;
      for (std::size_t d = 0; d < docs; ++d) {
        const std::u32string_view doc(ids.docs[d]);
        std::unordered_map<std::uint32_t, std::uint32_t> local;
        for (std::size_t i = 0; i + n <= doc.size(); ++i) {
          const auto [it, inserted] =
              gram_ids.try_emplace(doc.substr(i, n), static_cast<std::uint32_t>(gram_ids.size()));
          ++local[it->second];
        }
        Counts& out = counts_[d][n - 1];
        out.assign(local.begin(), local.end());
        std::sort(out.begin(), out.end());
      }
    }
    for (std::size_t d = 0; d < docs; ++d) lengths_[d] = ids.docs[d].size();
  }

  double bleu(std::size_t hyp, std::size_t ref, const BleuParams& params) const {
    return bleu_score(lengths_[hyp], lengths_[ref], params, [&](std::size_t n) {
      if (n > max_order_) return std::size_t{0};
      return clipped_matches(counts_[hyp][n - 1], counts_[ref][n - 1]);
    });
  }

 private:
  using Counts = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

  static std::size_t clipped_matches(const Counts& h, const Counts& r) {
    std::size_t matched = 0;
    auto hi = h.begin();
    auto ri = r.begin();
    while (hi != h.end() && ri != r.end()) {
      if (hi->first < ri->first) {
        ++hi;
      } else if (ri->first < hi->first) {
        ++ri;
      } else {
        matched += std::min(hi->second, ri->second);
        ++hi;
        ++ri;
      }
    }
    return matched;
  }

  std::size_t max_order_;
  std::vector<std::vector<Counts>> counts_;
  std::vector<std::size_t> lengths_;
};

}  // namespace detail

}  // namespace textdiv
