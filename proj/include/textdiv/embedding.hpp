#pragma once

// Document embeddings and the embedding-space diversity scores (remote
// clique, Chamfer distance). Remote providers live in embedding_remote.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textdiv/corpus.hpp"
#include "textdiv/error.hpp"
#include "textdiv/tokenizer.hpp"

namespace textdiv {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  std::size_t dimension() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Source of document embeddings. Implementations must be safe to call from
/// several threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string model_id() const = 0;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Deterministic hash-projection embedder for tests and offline runs: each
/// lowercased token maps to a pseudo-random vector in [-1, 1]^dim seeded by
/// (seed, token); a document is the L2-normalized sum of its tokens.
class StubEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::size_t dimension = 64, std::uint64_t seed = 0)
      : dimension_(dimension), seed_(seed) {
    if (dimension_ == 0) throw PreconditionError("embedding dimension must be >= 1");
  }

  std::string model_id() const override {
    return "stub-hash-" + std::to_string(dimension_) + "-seed" + std::to_string(seed_);
  }

  std::size_t dimension() const noexcept { return dimension_; }

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) out.push_back(embed_one(text));
    return out;
  }

 private:
  EmbeddingVector embed_one(const std::string& text) const {
    EmbeddingVector v{std::vector<double>(dimension_, 0.0), model_id()};
    for (const std::string& token : tokenize(text)) {
      std::uint64_t state = detail::fnv1a64(to_lower(token), 14695981039346656037ull ^ (seed_ * 0x100000001b3ull));
      for (double& x : v.values) {
        x += static_cast<double>(detail::splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
      }
    }
    double norm = 0.0;
    for (double x : v.values) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v.values) x /= norm;
    }
    return v;
  }

  std::size_t dimension_;
  std::uint64_t seed_;
};

/// Cosine similarity; 1 for equal vectors, 0 when exactly one is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw BackendError("cosine of vectors with different dimensions");
  if (std::equal(a.begin(), a.end(), b.begin())) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return 1.0 - cosine(a.values, b.values);
}

/// All vectors share one dimension and one model id.
inline void check_embeddings(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) return;
  for (const EmbeddingVector& v : vectors) {
    if (v.dimension() != vectors.front().dimension()) {
      throw BackendError("embedding dimension mismatch: " + std::to_string(v.dimension()) + " vs " +
                         std::to_string(vectors.front().dimension()));
    }
    if (v.model_id != vectors.front().model_id) {
      throw BackendError("embeddings from different models: '" + v.model_id + "' vs '" +
                         vectors.front().model_id + "'");
    }
  }
}

inline std::vector<EmbeddingVector> embed(const Corpus& corpus, EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const Document& d : corpus) texts.push_back(d.text());
  std::vector<EmbeddingVector> vectors = provider.embed(texts);
  if (vectors.size() != texts.size()) {
    throw BackendError("provider returned " + std::to_string(vectors.size()) + " embeddings for " +
                       std::to_string(texts.size()) + " texts");
  }
  check_embeddings(vectors);
  return vectors;
}

/// Mean over documents of the mean cosine distance to every other document.
inline double remote_clique(std::span<const EmbeddingVector> vectors) {
  if (vectors.size() < 2) throw PreconditionError("remote clique needs at least 2 documents");
  check_embeddings(vectors);
  const std::size_t n = vectors.size();
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cosine_distance(vectors[i], vectors[j]);
      row_sum[i] += d;
      row_sum[j] += d;
    }
  }
  double total = 0.0;
  for (double s : row_sum) total += s / static_cast<double>(n - 1);
  return total / static_cast<double>(n);
}

/// Mean over documents of the smallest cosine distance to any other document.
inline double chamfer_dist(std::span<const EmbeddingVector> vectors) {
  if (vectors.size() < 2) throw PreconditionError("Chamfer distance needs at least 2 documents");
  check_embeddings(vectors);
  const std::size_t n = vectors.size();
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cosine_distance(vectors[i], vectors[j]);
      nearest[i] = std::min(nearest[i], d);
      nearest[j] = std::min(nearest[j], d);
    }
  }
  double total = 0.0;
  for (double d : nearest) total += d;
  return total / static_cast<double>(n);
}

inline double remote_clique(const Corpus& corpus, EmbeddingProvider& provider) {
  if (corpus.size() < 2) throw PreconditionError("remote clique needs at least 2 documents");
  return remote_clique(embed(corpus, provider));
}

inline double chamfer_dist(const Corpus& corpus, EmbeddingProvider& provider) {
  if (corpus.size() < 2) throw PreconditionError("Chamfer distance needs at least 2 documents");
  return chamfer_dist(embed(corpus, provider));
}

}  // namespace textdiv
