#pragma once

// JSON-over-HTTP API for the exploration UI. Sessions live in memory only
// and expire after a TTL; demo datasets are read from a directory.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <shared_mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "textdiv/analysis.hpp"
#include "textdiv/corpus.hpp"
#include "textdiv/patterns.hpp"
#include "textdiv/tagset.hpp"
#include "textdiv/taggers.hpp"

namespace textdiv {

struct ServiceConfig {
  std::filesystem::path demo_dir;
  std::size_t max_upload_bytes = 20u * 1024u * 1024u;
  std::chrono::seconds ttl{60 * 60};
  std::string cors_origin = "*";
  TaggerSpec tagger;
  EmbeddingProvider* provider = nullptr;
  std::size_t workers = 0;
  std::size_t pair_budget = 1'000'000;
};

/// Metrics the dashboard shows, fast ones first.
inline const std::vector<std::string>& dashboard_fast_metrics() {
  static const std::vector<std::string> names{"cr", "cr_pos", "self_rep"};
  return names;
}

inline const std::vector<std::string>& dashboard_slow_metrics() {
  static const std::vector<std::string> names{"self_bleu", "hom_embed"};
  return names;
}

/// Static guide shown next to the dashboard scores.
inline nlohmann::json metric_guide() {
  return nlohmann::json::array({
      {{"metric", "cr"},
       {"name", "Compression ratio"},
       {"direction", "higher = more redundant"},
       {"description", "Size of the concatenated texts divided by their gzip-compressed size."}},
      {{"metric", "cr_pos"},
       {"name", "POS compression ratio"},
       {"direction", "higher = more repeated syntax"},
       {"description", "Compression ratio of the part-of-speech tag sequence."}},
      {{"metric", "self_rep"},
       {"name", "Self-repetition"},
       {"direction", "higher = more repeated 4-grams across texts"},
       {"description", "Mean over texts of log(1 + number of other texts sharing each of its 4-grams)."}},
      {{"metric", "self_bleu"},
       {"name", "Self-BLEU"},
       {"direction", "higher = more homogeneous"},
       {"description", "Mean BLEU of every text against every other text as single reference."}},
      {{"metric", "hom_embed"},
       {"name", "Embedding homogenization"},
       {"direction", "higher = more homogeneous"},
       {"description", "Mean pairwise cosine similarity of document embeddings, mapped to [0, 1]."}},
  });
}

namespace detail {

inline std::string random_session_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 2; ++i) {
    std::uint64_t v = rng();
    for (int k = 0; k < 16; ++k, v >>= 4) id += kHex[v & 0xF];
  }
  return id;
}

// Byte spans of tokens [start, end) to code point offsets for highlighting.
inline void add_char_offsets(nlohmann::json& index_json, const Corpus& corpus) {
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < corpus.size(); ++i) position.emplace(corpus[i].id(), i);
  for (auto& entry : index_json["patterns"]) {
    std::vector<std::string> docs;
    for (auto& occ : entry["occurrences"]) {
      const Document& doc = corpus[position.at(occ["doc"].get<std::string>())];
      const auto start = occ["start"].get<std::size_t>();
      const auto end = occ["end"].get<std::size_t>();
      occ["char_start"] = code_point_offset(doc.text(), doc.spans()[start].begin);
      occ["char_end"] = code_point_offset(doc.text(), doc.spans()[end - 1].end);
      if (docs.empty() || docs.back() != doc.id()) docs.push_back(doc.id());
    }
    entry["docs"] = docs;
  }
  nlohmann::json documents = nlohmann::json::array();
  for (const Document& d : corpus) documents.push_back({{"id", d.id()}, {"text", d.text()}});
  index_json["documents"] = std::move(documents);
}

inline nlohmann::json entry_json(const MetricEntry& e) {
  nlohmann::json j{{"status", status_name(e.status)}};
  if (e.value) j["value"] = *e.value;
  if (!e.reason.empty()) j["reason"] = e.reason;
  return j;
}

}  // namespace detail

class Service {
 public:
  explicit Service(ServiceConfig config) : config_(std::move(config)), tagger_(make_tagger(config_.tagger)) {
    routes();
  }

  ~Service() { stop(); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  httplib::Server& server() noexcept { return server_; }
  const ServiceConfig& config() const noexcept { return config_; }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  /// Binds an ephemeral port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

  std::size_t session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
  }

  /// Demo dataset ids: file stems under demo_dir with a known extension.
  std::vector<std::pair<std::string, std::filesystem::path>> demos() const {
    std::vector<std::pair<std::string, std::filesystem::path>> out;
    if (config_.demo_dir.empty() || !std::filesystem::is_directory(config_.demo_dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(config_.demo_dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".txt" || ext == ".jsonl" || ext == ".csv" || ext == ".tagged") {
        out.emplace_back(entry.path().stem().string(), entry.path());
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct MetricsJob {
    std::mutex mutex;
    bool started = false;
    bool finished = false;
    std::vector<MetricEntry> entries;  // dashboard order
    std::vector<std::string> flags;
    std::set<std::string> pending;
    std::atomic<std::size_t> pairs_done{0};
    std::atomic<std::size_t> pairs_total{0};
  };

  struct Session {
    std::string id;
    Corpus corpus;
    std::chrono::steady_clock::time_point created;
    std::mutex mutex;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::shared_future<std::string>> patterns;
    std::map<std::pair<std::size_t, std::size_t>, std::shared_future<std::string>> exact;
    std::shared_ptr<MetricsJob> metrics = std::make_shared<MetricsJob>();
    std::jthread worker;  // declared last: joined first on destruction
  };

  using SessionPtr = std::shared_ptr<Session>;

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
  }

  void sweep() {
    const auto now = std::chrono::steady_clock::now();
    std::vector<SessionPtr> expired;
    {
      std::unique_lock lock(sessions_mutex_);
      for (auto it = sessions_.begin(); it != sessions_.end();) {
        if (now - it->second->created >= config_.ttl) {
          expired.push_back(std::move(it->second));
          it = sessions_.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& s : expired) {
      std::lock_guard lock(s->mutex);
      s->worker.request_stop();
    }
  }

  SessionPtr find_session(const std::string& id) {
    sweep();
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  nlohmann::json create_session(Corpus corpus) {
    sweep();
    auto session = std::make_shared<Session>();
    session->id = detail::random_session_id();
    session->corpus = std::move(corpus);
    session->created = std::chrono::steady_clock::now();
    const nlohmann::json body{{"session_id", session->id},
                              {"doc_count", session->corpus.size()},
                              {"avg_length", avg_length(session->corpus)},
                              {"tagged", session->corpus.tagged()}};
    std::unique_lock lock(sessions_mutex_);
    sessions_.emplace(session->id, std::move(session));
    return body;
  }

  const Tagger& tagger_for(const Corpus& corpus) const {
    return corpus.tagged() ? static_cast<const Tagger&>(pretagged_) : *tagger_;
  }

  // Single-flight: the first caller computes, concurrent and later callers
  // share its result. Returns the body and whether it was a cache hit.
  template <class Key, class Fn>
  static std::pair<std::string, bool> single_flight(Session& s, std::map<Key, std::shared_future<std::string>>& cache,
                                                    const Key& key, Fn&& compute) {
    std::promise<std::string> promise;
    std::shared_future<std::string> future;
    bool owner = false;
    {
      std::lock_guard lock(s.mutex);
      const auto it = cache.find(key);
      if (it != cache.end()) {
        future = it->second;
      } else {
        future = promise.get_future().share();
        cache.emplace(key, future);
        owner = true;
      }
    }
    if (!owner) return {future.get(), true};
    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(s.mutex);
      cache.erase(key);
    }
    return {future.get(), false};
  }

  static std::optional<std::size_t> query_size(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    if (v.empty() || v.size() > 6 || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoul(v));
  }

  void handle_upload(const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > config_.max_upload_bytes) {
      return send_error(res, 413, "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
    }
    std::string content;
    std::string format_name;
    std::string field;
    std::string filename = "upload";
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) return send_error(res, 400, "multipart upload needs a 'file' part");
      const auto file = req.get_file_value("file");
      content = file.content;
      if (!file.filename.empty()) filename = file.filename;
      if (req.has_file("format")) format_name = req.get_file_value("format").content;
      if (req.has_file("field")) field = req.get_file_value("field").content;
    } else {
      content = req.body;
    }
    if (req.has_param("format")) format_name = req.get_param_value("format");
    if (req.has_param("field")) field = req.get_param_value("field");
    try {
      LoadOptions options;
      options.format = format_name.empty() ? format_from_path(filename) : parse_format(format_name);
      if (!field.empty()) options.field = field;
      send_json(res, 200, create_session(parse_corpus(content, options, filename)));
    } catch (const InputError& e) {
      send_error(res, 400, e.what());
    }
  }

  void handle_patterns(const httplib::Request& req, httplib::Response& res, const SessionPtr& s) {
    const auto n = query_size(req, "n", 4);
    const auto top_n = query_size(req, "top_n", 100);
    const auto min_docs = query_size(req, "min_docs", 3);
    if (!n || !top_n || !min_docs) return send_error(res, 422, "n, top_n and min_docs must be integers");
    if (*n < kUiMinLength || *n > kUiMaxLength) return send_error(res, 422, "n must be in [2, 10]");
    if (*top_n < 1) return send_error(res, 422, "top_n must be >= 1");
    if (*min_docs < 1) return send_error(res, 422, "min_docs must be >= 1");
    const auto [body, hit] = single_flight(*s, s->patterns, std::make_tuple(*n, *top_n, *min_docs), [&] {
      nlohmann::json j = to_json(extract_patterns(s->corpus, tagger_for(s->corpus), {*n, *top_n, *min_docs}));
      detail::add_char_offsets(j, s->corpus);
      return j.dump();
    });
    res.set_header("X-Cache", hit ? "hit" : "miss");
    res.set_content(body, "application/json");
  }

  void handle_exact(const httplib::Request& req, httplib::Response& res, const SessionPtr& s) {
    const auto n = query_size(req, "n", 4);
    const auto min_docs = query_size(req, "min_docs", 2);
    if (!n || !min_docs) return send_error(res, 422, "n and min_docs must be integers");
    if (*n < kUiMinLength || *n > kUiMaxLength) return send_error(res, 422, "n must be in [2, 10]");
    if (*min_docs < kUiMinLength || *min_docs > kUiMaxLength) {
      return send_error(res, 422, "min_docs must be in [2, 10]");
    }
    const auto [body, hit] = single_flight(*s, s->exact, std::make_pair(*n, *min_docs), [&] {
      nlohmann::json j = to_json(exact_matches(s->corpus, *n, *min_docs));
      detail::add_char_offsets(j, s->corpus);
      return j.dump();
    });
    res.set_header("X-Cache", hit ? "hit" : "miss");
    res.set_content(body, "application/json");
  }

  MetricsConfig metrics_config() const {
    MetricsConfig c;
    c.provider = config_.provider;
    c.pair_budget = config_.pair_budget;
    c.pairwise.workers = config_.workers;
    return c;
  }

  void start_metrics(const SessionPtr& s) {
    MetricsJob& job = *s->metrics;
    std::lock_guard lock(job.mutex);
    if (job.started) return;
    job.started = true;

    MetricsConfig cfg = metrics_config();
    cfg.tagger = &tagger_for(s->corpus);
    for (const std::string& name : dashboard_fast_metrics()) {
      job.entries.push_back(compute_metric(name, s->corpus, cfg));
    }
    if (concat(s->corpus).size() < kTinyInputBytes) job.flags.push_back("tiny_input");

    std::vector<std::string> slow;
    for (const std::string& name : dashboard_slow_metrics()) {
      // Gating outcomes (no provider, too few documents) are immediate.
      if ((needs_embeddings(name) && cfg.provider == nullptr) || s->corpus.size() < 2) {
        job.entries.push_back(compute_metric(name, s->corpus, cfg));
        continue;
      }
      job.entries.push_back(MetricEntry{name, MetricStatus::Ok, std::nullopt, {}, nlohmann::json::object(), 0.0});
      job.pending.insert(name);
      slow.push_back(name);
    }
    if (slow.empty()) {
      job.finished = true;
      return;
    }

    const std::size_t n = s->corpus.size();
    job.pairs_total = slow.size() * (n * (n - 1) / 2);
    std::lock_guard worker_lock(s->mutex);
    s->worker = std::jthread([job_ptr = s->metrics, corpus = s->corpus, cfg, slow](std::stop_token stop) mutable {
      cfg.pairwise.stop = stop;
      std::size_t base = 0;
      for (const std::string& name : slow) {
        cfg.pairwise.progress = [&job = *job_ptr, base](std::size_t done, std::size_t) {
          job.pairs_done = base + done;
        };
        MetricEntry entry = compute_metric(name, corpus, cfg);
        base += corpus.size() * (corpus.size() - 1) / 2;
        job_ptr->pairs_done = base;
        std::lock_guard lock(job_ptr->mutex);
        for (MetricEntry& e : job_ptr->entries) {
          if (e.name == name) e = std::move(entry);
        }
        job_ptr->pending.erase(name);
      }
      std::lock_guard lock(job_ptr->mutex);
      job_ptr->finished = true;
    });
  }

  void handle_metrics(httplib::Response& res, const SessionPtr& s) {
    start_metrics(s);
    MetricsJob& job = *s->metrics;
    std::lock_guard lock(job.mutex);
    nlohmann::json metrics = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json timings = nlohmann::json::object();
    for (const MetricEntry& e : job.entries) {
      if (job.pending.contains(e.name)) {
        metrics[e.name] = {{"status", "pending"}};
      } else {
        metrics[e.name] = detail::entry_json(e);
        timings[e.name] = e.seconds;
      }
      params[e.name] = e.params;
    }
    const nlohmann::json body{{"corpus_id", s->corpus.source().path},
                              {"doc_count", s->corpus.size()},
                              {"avg_length", avg_length(s->corpus)},
                              {"state", job.finished ? "complete" : "running"},
                              {"metrics", metrics},
                              {"params", params},
                              {"flags", job.flags},
                              {"guide", metric_guide()}};
    res.set_header("X-Metric-Timings", timings.dump());
    if (!job.finished) res.set_header("Retry-After", "1");
    send_json(res, job.finished ? 200 : 202, body);
  }

  void handle_metrics_status(httplib::Response& res, const SessionPtr& s) {
    start_metrics(s);
    MetricsJob& job = *s->metrics;
    std::lock_guard lock(job.mutex);
    nlohmann::json pending = nlohmann::json::array();
    for (const MetricEntry& e : job.entries) {
      if (job.pending.contains(e.name)) pending.push_back(e.name);
    }
    send_json(res, 200,
              {{"state", job.finished ? "complete" : "running"},
               {"pairs_done", job.pairs_done.load()},
               {"pairs_total", job.pairs_total.load()},
               {"pending", pending}});
  }

  void with_session(const httplib::Request& req, httplib::Response& res,
                    const std::function<void(const SessionPtr&)>& fn) {
    const SessionPtr s = find_session(req.matches[1]);
    if (!s) return send_error(res, 404, "unknown or expired session");
    try {
      fn(s);
    } catch (const PreconditionError& e) {
      send_error(res, 422, e.what());
    } catch (const InputError& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  }

  void routes() {
    server_.set_payload_max_length(config_.max_upload_bytes);
    server_.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"},
                                 {"Access-Control-Expose-Headers", "X-Cache, X-Metric-Timings, Retry-After"}});
    server_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server_.Get("/api/tagset", [](const httplib::Request&, httplib::Response& res) {
      nlohmann::json tags = nlohmann::json::array();
      for (const TagInfo& t : kPennTagset) {
        tags.push_back({{"tag", t.tag}, {"description", t.description}, {"example", t.example}});
      }
      send_json(res, 200, {{"tagset", "penn-treebank"}, {"tags", tags}});
    });

    server_.Get("/api/demos", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& [id, path] : demos()) {
        list.push_back({{"id", id}, {"format", format_name(format_from_path(path))}});
      }
      send_json(res, 200, {{"demos", list}});
    });

    server_.Post(R"(/api/demos/([A-Za-z0-9_.-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      for (const auto& [id, path] : demos()) {
        if (id != req.matches[1]) continue;
        try {
          return send_json(res, 200, create_session(load_corpus(path)));
        } catch (const InputError& e) {
          return send_error(res, 500, std::string("demo dataset is unreadable: ") + e.what());
        }
      }
      send_error(res, 404, "unknown demo dataset");
    });

    server_.Post("/api/corpus", [this](const httplib::Request& req, httplib::Response& res) { handle_upload(req, res); });

    server_.Get(R"(/api/([0-9a-f]+)/patterns)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const SessionPtr& s) { handle_patterns(req, res, s); });
    });
    server_.Get(R"(/api/([0-9a-f]+)/exact)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const SessionPtr& s) { handle_exact(req, res, s); });
    });
    server_.Get(R"(/api/([0-9a-f]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const SessionPtr& s) { handle_metrics(res, s); });
    });
    server_.Get(R"(/api/([0-9a-f]+)/metrics/status)", [this](const httplib::Request& req, httplib::Response& res) {
      with_session(req, res, [&](const SessionPtr& s) { handle_metrics_status(res, s); });
    });
    server_.Delete(R"(/api/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
      SessionPtr removed;
      {
        std::unique_lock lock(sessions_mutex_);
        const auto it = sessions_.find(req.matches[1]);
        if (it != sessions_.end()) {
          removed = std::move(it->second);
          sessions_.erase(it);
        }
      }
      if (!removed) return send_error(res, 404, "unknown or expired session");
      {
        std::lock_guard session_lock(removed->mutex);
        removed->worker.request_stop();
      }
      res.status = 204;
    });
  }

  ServiceConfig config_;
  std::unique_ptr<Tagger> tagger_;
  PretaggedTagger pretagged_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, SessionPtr> sessions_;
  httplib::Server server_;
};

}  // namespace textdiv
