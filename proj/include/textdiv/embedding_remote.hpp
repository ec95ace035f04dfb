#pragma once

// Embedding provider for an OpenAI-compatible embeddings endpoint:
// POST {model, input: [strings]} -> {data: [{embedding: [floats]}]}.

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "textdiv/embedding.hpp"
#include "textdiv/error.hpp"
#include "textdiv/taggers.hpp"

namespace textdiv {

struct RemoteEmbeddingConfig {
  std::string endpoint;  // full URL, e.g. https://host/v1/embeddings
  std::string model;
  std::string token;     // bearer token; empty = no Authorization header
  std::size_t batch_size = 64;
  int max_attempts = 3;  // per batch, for transport errors, 429 and 5xx
  std::chrono::milliseconds backoff{200};
  int timeout_seconds = 60;

  /// TEXTDIV_EMBED_ENDPOINT, TEXTDIV_EMBED_MODEL, TEXTDIV_EMBED_TOKEN.
  /// nullopt when no endpoint is set.
  static std::optional<RemoteEmbeddingConfig> from_env() {
    const char* endpoint = std::getenv("TEXTDIV_EMBED_ENDPOINT");
    if (endpoint == nullptr || *endpoint == '\0') return std::nullopt;
    RemoteEmbeddingConfig c;
    c.endpoint = endpoint;
    if (const char* m = std::getenv("TEXTDIV_EMBED_MODEL")) c.model = m;
    if (const char* t = std::getenv("TEXTDIV_EMBED_TOKEN")) c.token = t;
    return c;
  }
};

/// Batched, retrying client with a content-keyed response cache.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(RemoteEmbeddingConfig config)
      : config_(std::move(config)), url_(detail::split_url(config_.endpoint)) {
    if (config_.model.empty()) throw InputError("remote embedding provider needs a model id");
    if (config_.batch_size == 0) throw InputError("embedding batch size must be >= 1");
    if (config_.max_attempts < 1) config_.max_attempts = 1;
  }

  std::string model_id() const override { return config_.model; }

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    std::vector<std::string> missing;
    {
      std::lock_guard lock(mutex_);
      for (const std::string& t : texts) {
        if (!cache_.contains(t) && std::find(missing.begin(), missing.end(), t) == missing.end()) {
          missing.push_back(t);
        }
      }
    }
    for (std::size_t i = 0; i < missing.size(); i += config_.batch_size) {
      const std::span<const std::string> batch(missing.data() + i, std::min(config_.batch_size, missing.size() - i));
      std::vector<std::vector<double>> vectors = request(batch);
      std::lock_guard lock(mutex_);
      for (std::size_t k = 0; k < batch.size(); ++k) {
        if (dimension_ == 0) dimension_ = vectors[k].size();
        if (vectors[k].size() != dimension_) {
          throw BackendError("embedding dimension changed between batches: " + std::to_string(vectors[k].size()) +
                             " vs " + std::to_string(dimension_));
        }
        cache_.emplace(batch[k], std::move(vectors[k]));
      }
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::lock_guard lock(mutex_);
    for (const std::string& t : texts) out.push_back(EmbeddingVector{cache_.at(t), config_.model});
    return out;
  }

  /// Number of HTTP requests issued, retries included.
  std::size_t requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  std::vector<std::vector<double>> request(std::span<const std::string> batch) {
    const nlohmann::json body{{"model", config_.model}, {"input", std::vector<std::string>(batch.begin(), batch.end())}};
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      if (attempt > 1) std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 2)));
      {
        std::lock_guard lock(mutex_);
        ++requests_;
      }
      httplib::Client client(url_.origin);
      client.set_connection_timeout(config_.timeout_seconds);
      client.set_read_timeout(config_.timeout_seconds);
      httplib::Headers headers;
      if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
      const auto res = client.Post(url_.path, headers, payload, "application/json");
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 401 || res->status == 403) {
        throw AuthError("embedding endpoint " + config_.endpoint + " rejected credentials (HTTP " +
                        std::to_string(res->status) + ")");
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw BackendError("embedding endpoint " + config_.endpoint + " answered HTTP " + std::to_string(res->status));
      }
      return parse(res->body, batch.size());
    }
    throw BackendError("embedding endpoint " + config_.endpoint + " unreachable after " +
                       std::to_string(config_.max_attempts) + " attempts: " + last_error);
  }

  std::vector<std::vector<double>> parse(const std::string& body, std::size_t expected) const {
    try {
      const nlohmann::json j = nlohmann::json::parse(body);
      std::vector<std::vector<double>> out;
      for (const auto& item : j.at("data")) out.push_back(item.at("embedding").get<std::vector<double>>());
      if (out.size() != expected) {
        throw BackendError("embedding endpoint " + config_.endpoint + " returned " + std::to_string(out.size()) +
                           " vectors for " + std::to_string(expected) + " inputs");
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError("embedding endpoint " + config_.endpoint + " returned malformed JSON: " + e.what());
    }
  }

  RemoteEmbeddingConfig config_;
  detail::Url url_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::vector<double>> cache_;
  std::size_t dimension_ = 0;
  std::size_t requests_ = 0;
};

}  // namespace textdiv
