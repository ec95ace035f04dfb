#pragma once

// Homogenization scores: mean pairwise similarity over a corpus, with a
// memo of already-scored pairs and a bounded worker pool.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "textdiv/corpus.hpp"
#include "textdiv/detail/interned.hpp"
#include "textdiv/embedding.hpp"
#include "textdiv/error.hpp"
#include "textdiv/similarity.hpp"

namespace textdiv {

struct SimilarityKind {
  enum class Kind { Bleu, RougeL, EmbedCosine };

  Kind kind = Kind::Bleu;
  BleuParams bleu;
  double rouge_beta = 1.0;
  bool lowercase = false;

  static SimilarityKind make_bleu(BleuParams params = {}) { return {Kind::Bleu, params, 1.0, false}; }
  static SimilarityKind make_rouge_l(double beta = 1.0) { return {Kind::RougeL, {}, beta, false}; }
  static SimilarityKind make_embed_cosine() { return {Kind::EmbedCosine, {}, 1.0, false}; }

  std::string name() const {
    switch (kind) {
      case Kind::Bleu: return "bleu";
      case Kind::RougeL: return "rougeL";
      case Kind::EmbedCosine: return "embed-cosine";
    }
    return "bleu";
  }

  /// Everything that affects a pair's score. `model` names the embedding model.
  std::string signature(std::string_view model = {}) const {
    std::ostringstream out;
    out.precision(17);
    out << name() << ";lower=" << lowercase;
    if (kind == Kind::Bleu) out << ";order=" << bleu.max_order << ";eps=" << bleu.epsilon;
    if (kind == Kind::RougeL) out << ";beta=" << rouge_beta;
    if (kind == Kind::EmbedCosine) out << ";model=" << model;
    return out.str();
  }
};

inline SimilarityKind parse_similarity(std::string_view name) {
  if (name == "bleu") return SimilarityKind::make_bleu();
  if (name == "rougeL" || name == "rougel" || name == "rouge-l") return SimilarityKind::make_rouge_l();
  if (name == "embed-cosine" || name == "embed") return SimilarityKind::make_embed_cosine();
  throw InputError("unknown similarity '" + std::string(name) + "'");
}

/// Symmetric memo of pair scores keyed by unordered document-id pairs.
/// Entries are written once; concurrent readers and writers are allowed.
class SimilarityCache {
 public:
  SimilarityCache() = default;
  SimilarityCache(const SimilarityCache&) = delete;
  SimilarityCache& operator=(const SimilarityCache&) = delete;

  std::optional<double> find(std::string_view a, std::string_view b) const {
    const std::string k = key(a, b);
    const Shard& shard = shard_for(k);
    std::shared_lock lock(shard.mutex);
    const auto it = shard.map.find(k);
    if (it == shard.map.end()) return std::nullopt;
    return it->second;
  }

  /// Stores `value` unless the pair is already present; returns whether it was stored.
  bool insert(std::string_view a, std::string_view b, double value) {
    std::string k = key(a, b);
    Shard& shard = shard_for(k);
    std::unique_lock lock(shard.mutex);
    return shard.map.emplace(std::move(k), value).second;
  }

  std::size_t size() const {
    std::size_t total = 0;
    for (const Shard& s : shards_) {
      std::shared_lock lock(s.mutex);
      total += s.map.size();
    }
    return total;
  }

  /// Ties the cache to one similarity signature; reusing it for another throws.
  void bind(const std::string& signature) {
    std::lock_guard lock(bind_mutex_);
    if (signature_.empty()) {
      signature_ = signature;
    } else if (signature_ != signature) {
      throw PreconditionError("similarity cache bound to '" + signature_ + "', not '" + signature + "'");
    }
  }

  std::string signature() const {
    std::lock_guard lock(bind_mutex_);
    return signature_;
  }

  std::uint64_t hits() const noexcept { return hits_.load(); }
  std::uint64_t misses() const noexcept { return misses_.load(); }
  void add_stats(std::uint64_t hits, std::uint64_t misses) noexcept {
    hits_ += hits;
    misses_ += misses;
  }
  void reset_stats() noexcept {
    hits_ = 0;
    misses_ = 0;
  }

  /// (smaller id, larger id, score), sorted.
  std::vector<std::tuple<std::string, std::string, double>> entries() const {
    std::vector<std::tuple<std::string, std::string, double>> out;
    for (const Shard& s : shards_) {
      std::shared_lock lock(s.mutex);
      for (const auto& [k, v] : s.map) {
        const std::size_t colon = k.find(':');
        const std::size_t len = std::stoul(k.substr(0, colon));
        out.emplace_back(k.substr(colon + 1, len), k.substr(colon + 1 + len), v);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::size_t kShards = 32;

  struct Shard {
    mutable std::shared_mutex mutex;
    std::unordered_map<std::string, double> map;
  };

  static std::string key(std::string_view a, std::string_view b) {
    if (b < a) std::swap(a, b);
    std::string k = std::to_string(a.size());
    k += ':';
    k += a;
    k += b;
    return k;
  }

  Shard& shard_for(const std::string& k) { return shards_[std::hash<std::string>{}(k) % kShards]; }
  const Shard& shard_for(const std::string& k) const { return shards_[std::hash<std::string>{}(k) % kShards]; }

  std::array<Shard, kShards> shards_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  mutable std::mutex bind_mutex_;
  std::string signature_;
};

struct PairwiseOptions {
  /// Worker threads; 0 means one per hardware thread.
  std::size_t workers = 0;
  /// Called after each finished row with (pairs done, total pairs). May be
  /// invoked from worker threads.
  std::function<void(std::size_t, std::size_t)> progress;
  std::stop_token stop;
};

struct PairwiseStats {
  std::size_t pairs = 0;
  std::size_t hits = 0;
  std::size_t misses = 0;
  double seconds = 0.0;
};

/// Score of the unordered pair (i, j), i < j.
using PairScore = std::function<double(std::size_t, std::size_t)>;

inline std::size_t resolve_workers(std::size_t workers) {
  if (workers != 0) return workers;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Ensures every unordered pair of `ids` is in `cache`, scoring only missing
/// pairs. On failure the pairs finished so far stay cached, so a rerun resumes.
inline PairwiseStats pairwise_map(std::span<const std::string> ids, const PairScore& score, SimilarityCache& cache,
                                  const PairwiseOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  const std::size_t n = ids.size();
  const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
  const std::size_t workers = std::min(resolve_workers(options.workers), std::max<std::size_t>(1, n));

  std::atomic<std::size_t> next_row{0};
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> hits{0};
  std::atomic<std::size_t> misses{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto run = [&] {
    std::size_t local_hits = 0;
    std::size_t local_misses = 0;
    try {
      for (std::size_t i = next_row++; i + 1 < n; i = next_row++) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (failed.load(std::memory_order_relaxed)) break;
          if (options.stop.stop_requested()) throw CancelledError();
          if (cache.find(ids[i], ids[j])) {
            ++local_hits;
          } else {
            cache.insert(ids[i], ids[j], score(i, j));
            ++local_misses;
          }
        }
        if (failed.load(std::memory_order_relaxed)) break;
        const std::size_t now = done += n - 1 - i;
        if (options.progress) options.progress(now, total);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed = true;
    }
    hits += local_hits;
    misses += local_misses;
  };

  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  }

  cache.add_stats(hits, misses);
  if (error) std::rethrow_exception(error);
  return PairwiseStats{total, hits, misses,
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()};
}

namespace detail {

inline std::vector<std::string> document_ids(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const Document& d : corpus) ids.push_back(d.id());
  return ids;
}

// Value built on first use; safe to call from several threads.
template <class T>
class Lazy {
 public:
  template <class Make>
  const T& get(Make&& make) {
    std::call_once(once_, [&] { value_.emplace(make()); });
    return *value_;
  }

 private:
  std::once_flag once_;
  std::optional<T> value_;
};

// Builds a pair scorer for `corpus`, which must outlive it. Token statistics
// are prepared on the first scored pair, so a fully cached run skips them.
// Asymmetric measures are scored in both directions and averaged, so the
// unordered-pair value equals the mean of the two ordered-pair values.
inline PairScore make_pair_score(const Corpus& corpus, const SimilarityKind& sim, EmbeddingProvider* provider,
                                 std::string& model) {
  switch (sim.kind) {
    case SimilarityKind::Kind::Bleu: {
      auto profiles = std::make_shared<Lazy<BleuProfiles>>();
      return [&corpus, profiles, sim](std::size_t i, std::size_t j) {
        const BleuProfiles& p =
            profiles->get([&] { return BleuProfiles(intern_tokens(corpus, sim.lowercase), sim.bleu.max_order); });
        return (p.bleu(i, j, sim.bleu) + p.bleu(j, i, sim.bleu)) / 2.0;
      };
    }
    case SimilarityKind::Kind::RougeL: {
      auto interned = std::make_shared<Lazy<InternedCorpus>>();
      return [&corpus, interned, sim](std::size_t i, std::size_t j) {
        const InternedCorpus& ids = interned->get([&] { return intern_tokens(corpus, sim.lowercase); });
        const double forward = rouge_l(ids.docs[i], ids.docs[j], sim.rouge_beta);
        if (sim.rouge_beta == 1.0) return forward;
        return (forward + rouge_l(ids.docs[j], ids.docs[i], sim.rouge_beta)) / 2.0;
      };
    }
    case SimilarityKind::Kind::EmbedCosine: {
      if (provider == nullptr) throw BackendError("embed-cosine similarity needs an embedding provider");
      auto vectors = std::make_shared<const std::vector<EmbeddingVector>>(embed(corpus, *provider));
      model = provider->model_id();
      return [vectors](std::size_t i, std::size_t j) {
        return (1.0 + cosine((*vectors)[i].values, (*vectors)[j].values)) / 2.0;
      };
    }
  }
  throw UnsupportedError("unknown similarity kind");
}

}  // namespace detail

inline PairwiseStats pairwise_map(const Corpus& corpus, const SimilarityKind& sim, SimilarityCache& cache,
                                  const PairwiseOptions& options = {}, EmbeddingProvider* provider = nullptr) {
  std::string model;
  const PairScore score = detail::make_pair_score(corpus, sim, provider, model);
  cache.bind(sim.signature(model));
  const std::vector<std::string> ids = detail::document_ids(corpus);
  return pairwise_map(ids, score, cache, options);
}

enum class Normalization { MeanPairs, Literal };

inline Normalization parse_normalization(std::string_view name) {
  if (name == "mean-pairs" || name == "mean") return Normalization::MeanPairs;
  if (name == "literal") return Normalization::Literal;
  throw InputError("unknown normalization '" + std::string(name) + "'");
}

struct HomogenizationOptions {
  Normalization normalization = Normalization::MeanPairs;
  PairwiseOptions pairwise;
  SimilarityCache* cache = nullptr;       // optional shared memo
  EmbeddingProvider* provider = nullptr;  // required for embed-cosine
};

/// mean-pairs: mean similarity over ordered pairs d != d'.
/// literal:    sum over ordered pairs divided by |D| - 1.
inline double homogenization(const Corpus& corpus, const SimilarityKind& sim,
                             const HomogenizationOptions& options = {}) {
  if (corpus.size() < 2) throw PreconditionError("homogenization needs at least 2 documents");
  SimilarityCache local;
  SimilarityCache& cache = options.cache ? *options.cache : local;
  pairwise_map(corpus, sim, cache, options.pairwise, options.provider);

  // Summed in a fixed order so results do not depend on the worker count.
  const std::size_t n = corpus.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += *cache.find(corpus[i].id(), corpus[j].id());
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  if (options.normalization == Normalization::Literal) return 2.0 * sum / static_cast<double>(n - 1);
  return sum / pairs;
}

/// Homogenization with BLEU: each text scored against each other text as its
/// single reference.
inline double self_bleu(const Corpus& corpus, const HomogenizationOptions& options = {}) {
  return homogenization(corpus, SimilarityKind::make_bleu(), options);
}

}  // namespace textdiv
