#pragma once

// External taggers speaking newline-delimited JSON, either to a subprocess
// over stdin/stdout or to an HTTP endpoint. Request {id, tokens}, response
// {id, tags}. Needs Boost.Process and cpp-httplib.

#include <atomic>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <boost/process.hpp>
#include <httplib.h>
#include <json.hpp>

#include "textdiv/error.hpp"
#include "textdiv/pos_tagger.hpp"

namespace textdiv {

namespace detail {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

inline Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw InputError("endpoint '" + url + "' is not an absolute http(s) URL");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

inline std::vector<std::string> parse_tag_response(const std::string& body, const std::string& expected_id,
                                                   std::size_t expected_len, const std::string& who) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw TaggerError(who + " returned malformed JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("tags") || !j["tags"].is_array()) {
    throw TaggerError(who + " response lacks a 'tags' array");
  }
  if (j.contains("id") && j["id"].is_string() && j["id"].get<std::string>() != expected_id) {
    throw TaggerError(who + " answered request '" + j["id"].get<std::string>() + "', expected '" + expected_id +
                      "'");
  }
  std::vector<std::string> tags;
  for (const auto& t : j["tags"]) {
    if (!t.is_string()) throw TaggerError(who + " returned a non-string tag");
    tags.push_back(t.get<std::string>());
  }
  if (tags.size() != expected_len) {
    throw TaggerError(who + " returned " + std::to_string(tags.size()) + " tags for " +
                      std::to_string(expected_len) + " tokens");
  }
  for (const std::string& t : tags) {
    if (!is_known_tag(t)) throw TaggerError(who + " emitted unknown tag '" + t + "'");
  }
  return tags;
}

}  // namespace detail

/// Long-lived child process; one request line in, one response line out.
/// Calls are serialized.
class SubprocessTagger final : public Tagger {
 public:
  explicit SubprocessTagger(std::string command) : command_(std::move(command)) {
    if (command_.empty()) throw InputError("external tagger command is empty");
  }

  ~SubprocessTagger() override {
    std::lock_guard lock(mutex_);
    shutdown();
  }

  std::string id() const override { return "external:" + command_; }

  std::vector<std::string> tag(std::span<const std::string> tokens) const override {
    if (tokens.empty()) return {};
    std::lock_guard lock(mutex_);
    const std::string request_id = std::to_string(next_id_++);
    const nlohmann::json request{{"id", request_id}, {"tokens", std::vector<std::string>(tokens.begin(), tokens.end())}};
    start();
    std::string line;
    try {
      *in_ << request.dump() << '\n' << std::flush;
      if (!std::getline(*out_, line)) throw TaggerError("external tagger '" + command_ + "' closed its output");
    } catch (const TaggerError&) {
      shutdown();
      throw;
    } catch (const std::exception& e) {
      shutdown();
      throw TaggerError("external tagger '" + command_ + "' is unreachable: " + e.what());
    }
    return detail::parse_tag_response(line, request_id, tokens.size(), "external tagger '" + command_ + "'");
  }

 private:
  void start() const {
    if (child_ && child_->running()) return;
    shutdown();
    try {
      in_ = std::make_unique<boost::process::opstream>();
      out_ = std::make_unique<boost::process::ipstream>();
      namespace bp = boost::process;
      child_ = std::make_unique<bp::child>(command_, bp::std_in < *in_, bp::std_out > *out_);
    } catch (const std::exception& e) {
      shutdown();
      throw TaggerError("cannot start external tagger '" + command_ + "': " + e.what());
    }
  }

  void shutdown() const {
    if (in_) {
      in_->pipe().close();
    }
    if (child_) {
      std::error_code ec;
      if (child_->running(ec)) child_->wait_for(std::chrono::seconds(2), ec);
      if (child_->running(ec)) child_->terminate(ec);
    }
    child_.reset();
    in_.reset();
    out_.reset();
  }

  std::string command_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<boost::process::opstream> in_;
  mutable std::unique_ptr<boost::process::ipstream> out_;
  mutable std::unique_ptr<boost::process::child> child_;
  mutable std::uint64_t next_id_ = 0;
};

/// POSTs {id, tokens} to an HTTP endpoint. Serialized unless the endpoint is
/// declared concurrency-safe.
class HttpTagger final : public Tagger {
 public:
  explicit HttpTagger(std::string endpoint, bool concurrency_safe = false)
      : endpoint_(std::move(endpoint)), url_(detail::split_url(endpoint_)), concurrency_safe_(concurrency_safe) {}

  std::string id() const override { return "external:" + endpoint_; }

  std::vector<std::string> tag(std::span<const std::string> tokens) const override {
    if (tokens.empty()) return {};
    std::unique_lock lock(mutex_, std::defer_lock);
    if (!concurrency_safe_) lock.lock();
    const std::string request_id = std::to_string(next_id_++);
    const nlohmann::json request{{"id", request_id}, {"tokens", std::vector<std::string>(tokens.begin(), tokens.end())}};
    httplib::Client client(url_.origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    const auto res = client.Post(url_.path, request.dump(), "application/json");
    if (!res) {
      throw TaggerError("external tagger " + endpoint_ + " is unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw TaggerError("external tagger " + endpoint_ + " answered HTTP " + std::to_string(res->status));
    }
    return detail::parse_tag_response(res->body, request_id, tokens.size(), "external tagger " + endpoint_);
  }

 private:
  std::string endpoint_;
  detail::Url url_;
  bool concurrency_safe_;
  mutable std::mutex mutex_;
  mutable std::atomic<std::uint64_t> next_id_{0};
};

inline std::unique_ptr<Tagger> make_tagger(const TaggerSpec& spec) {
  switch (spec.kind) {
    case TaggerSpec::Kind::Builtin:
      if (!spec.lexicon_path.empty()) return std::make_unique<BuiltinTagger>(BuiltinTagger::from_file(spec.lexicon_path));
      return std::make_unique<BuiltinTagger>();
    case TaggerSpec::Kind::Pretagged:
      return std::make_unique<PretaggedTagger>();
    case TaggerSpec::Kind::External:
      if (!spec.command.empty() && !spec.endpoint.empty()) {
        throw InputError("external tagger needs either a command or an endpoint, not both");
      }
      if (!spec.command.empty()) return std::make_unique<SubprocessTagger>(spec.command);
      if (!spec.endpoint.empty()) return std::make_unique<HttpTagger>(spec.endpoint, spec.concurrency_safe);
      throw InputError("external tagger needs a command or an endpoint");
  }
  throw UnsupportedError("unknown tagger kind");
}

/// One tag per token under `spec`. Pretagged specs cannot infer tags.
inline std::vector<std::string> tag(std::span<const std::string> tokens, const TaggerSpec& spec) {
  if (tokens.empty()) return {};
  if (spec.kind == TaggerSpec::Kind::Pretagged) {
    throw TaggerError("the pretagged tagger reads tags from input and cannot tag raw tokens");
  }
  const auto tagger = make_tagger(spec);
  std::vector<std::string> tags = tagger->tag(tokens);
  if (tags.size() != tokens.size()) throw TaggerError("tagger returned a length-mismatched sequence");
  return tags;
}

}  // namespace textdiv
