#pragma once

// Length control, the all-metrics report and system-level correlation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "textdiv/compression.hpp"
#include "textdiv/corpus.hpp"
#include "textdiv/embedding.hpp"
#include "textdiv/error.hpp"
#include "textdiv/ngram_metrics.hpp"
#include "textdiv/pairwise.hpp"
#include "textdiv/pos_tagger.hpp"
#include "textdiv/similarity.hpp"

namespace textdiv {

// ---------------------------------------------------------------- truncation

/// Outputs of several systems for the same ordered inputs.
struct SystemGroup {
  std::map<std::string, Corpus> systems;

  /// Throws InputError unless every system has the same ordered id list.
  void check_aligned() const {
    if (systems.empty()) throw InputError("system group is empty");
    const Corpus& first = systems.begin()->second;
    for (const auto& [name, corpus] : systems) {
      bool same = corpus.size() == first.size();
      for (std::size_t i = 0; same && i < corpus.size(); ++i) same = corpus[i].id() == first[i].id();
      if (!same) {
        throw InputError("system '" + name + "' is not aligned with '" + systems.begin()->first +
                         "' (document ids differ)");
      }
    }
  }
};

/// Truncates, per input id, every system's output to the shortest token
/// count any system produced for that id.
inline SystemGroup truncate_to_shortest(const SystemGroup& group) {
  group.check_aligned();
  const std::size_t docs = group.systems.begin()->second.size();
  std::vector<std::size_t> shortest(docs, static_cast<std::size_t>(-1));
  for (const auto& [name, corpus] : group.systems) {
    for (std::size_t i = 0; i < docs; ++i) {
      if (corpus[i].empty()) {
        throw PreconditionError("document '" + corpus[i].id() + "' of system '" + name + "' is empty");
      }
      shortest[i] = std::min(shortest[i], corpus[i].size());
    }
  }
  SystemGroup out;
  for (const auto& [name, corpus] : group.systems) {
    std::vector<Document> truncated;
    truncated.reserve(docs);
    for (std::size_t i = 0; i < docs; ++i) truncated.push_back(corpus[i].truncated(shortest[i]));
    out.systems.emplace(name, Corpus(std::move(truncated), corpus.source()));
  }
  return out;
}

// ---------------------------------------------------------------- metrics

inline const std::vector<std::string>& all_metric_names() {
  static const std::vector<std::string> names{"cr",        "cr_pos",     "ngd",       "mattr",
                                              "hdd",       "self_rep",   "self_bleu", "hom_rougel",
                                              "hom_embed", "remote_clique", "chamfer"};
  return names;
}

inline bool is_metric_name(std::string_view name) {
  const auto& names = all_metric_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

inline bool is_pairwise_metric(std::string_view name) {
  return name == "self_bleu" || name == "hom_rougel" || name == "hom_embed" || name == "remote_clique" ||
         name == "chamfer";
}

inline bool needs_embeddings(std::string_view name) {
  return name == "hom_embed" || name == "remote_clique" || name == "chamfer";
}

struct MetricsConfig {
  CompressionConfig compression;
  NgdParams ngd;
  MattrParams mattr;
  HddParams hdd;
  SelfRepetitionParams self_rep;
  BleuParams bleu;
  double rouge_beta = 1.0;
  Normalization normalization = Normalization::MeanPairs;
  PairwiseOptions pairwise;
  std::size_t pair_budget = 1'000'000;  // unordered pairs per pairwise metric
  bool force = false;                   // ignore pair_budget
  std::vector<std::string> only;        // empty = every metric
  const Tagger* tagger = nullptr;       // null = builtin
  EmbeddingProvider* provider = nullptr;

  std::vector<std::string> metrics() const {
    if (only.empty()) return all_metric_names();
    for (const std::string& m : only) {
      if (!is_metric_name(m)) throw InputError("unknown metric '" + m + "'");
    }
    std::vector<std::string> out;
    for (const std::string& m : all_metric_names()) {
      if (std::find(only.begin(), only.end(), m) != only.end()) out.push_back(m);
    }
    return out;
  }
};

enum class MetricStatus { Ok, Skipped, Unavailable, Failed };

inline std::string_view status_name(MetricStatus s) {
  switch (s) {
    case MetricStatus::Ok: return "ok";
    case MetricStatus::Skipped: return "skipped";
    case MetricStatus::Unavailable: return "unavailable";
    case MetricStatus::Failed: return "failed";
  }
  return "failed";
}

inline MetricStatus parse_status(std::string_view s) {
  if (s == "ok") return MetricStatus::Ok;
  if (s == "skipped") return MetricStatus::Skipped;
  if (s == "unavailable") return MetricStatus::Unavailable;
  if (s == "failed") return MetricStatus::Failed;
  throw InputError("unknown metric status '" + std::string(s) + "'");
}

struct MetricEntry {
  std::string name;
  MetricStatus status = MetricStatus::Ok;
  std::optional<double> value;
  std::string reason;
  nlohmann::json params = nlohmann::json::object();
  double seconds = 0.0;
};

struct MetricReport {
  std::string corpus_id;
  std::size_t doc_count = 0;
  std::size_t token_count = 0;
  double avg_length = 0.0;
  std::vector<MetricEntry> entries;
  std::vector<std::string> flags;

  const MetricEntry* find(std::string_view name) const {
    for (const MetricEntry& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }

  std::optional<double> score(std::string_view name) const {
    const MetricEntry* e = find(name);
    return e && e->status == MetricStatus::Ok ? e->value : std::nullopt;
  }

  /// Some metric was skipped or failed. Unconfigured embedding metrics do not count.
  bool partial() const {
    return std::any_of(entries.begin(), entries.end(), [](const MetricEntry& e) {
      return e.status == MetricStatus::Skipped || e.status == MetricStatus::Failed;
    });
  }
};

namespace detail {

inline std::string boundary_name(Boundary b) {
  return b == Boundary::Concatenated ? "concatenated" : "per-document";
}

inline std::string normalization_name(Normalization n) {
  return n == Normalization::Literal ? "literal" : "mean-pairs";
}

inline std::string tagger_id(const MetricsConfig& config) {
  return config.tagger ? config.tagger->id() : BuiltinTagger().id();
}

inline nlohmann::json metric_params(std::string_view name, const MetricsConfig& c) {
  const std::string model = c.provider ? c.provider->model_id() : std::string();
  if (name == "cr") return {{"algorithm", compressor_name(c.compression.algorithm)}, {"level", c.compression.level}};
  if (name == "cr_pos") {
    return {{"algorithm", compressor_name(c.compression.algorithm)},
            {"level", c.compression.level},
            {"tagger", tagger_id(c)}};
  }
  if (name == "ngd") {
    return {{"max_n", c.ngd.max_n}, {"lowercase", c.ngd.lowercase}, {"boundary", boundary_name(c.ngd.boundary)}};
  }
  if (name == "mattr") {
    return {{"window", c.mattr.window},
            {"lowercase", c.mattr.lowercase},
            {"boundary", boundary_name(c.mattr.boundary)}};
  }
  if (name == "hdd") return {{"sample", c.hdd.sample}, {"lowercase", c.hdd.lowercase}};
  if (name == "self_rep") return {{"n", c.self_rep.n}, {"lowercase", c.self_rep.lowercase}};
  if (name == "self_bleu") {
    return {{"max_order", c.bleu.max_order},
            {"epsilon", c.bleu.epsilon},
            {"normalization", normalization_name(c.normalization)}};
  }
  if (name == "hom_rougel") return {{"beta", c.rouge_beta}, {"normalization", normalization_name(c.normalization)}};
  if (name == "hom_embed") return {{"model", model}, {"normalization", normalization_name(c.normalization)}};
  return {{"model", model}, {"distance", "cosine"}};
}

inline double run_metric(std::string_view name, const Corpus& corpus, const MetricsConfig& c) {
  HomogenizationOptions hom;
  hom.normalization = c.normalization;
  hom.pairwise = c.pairwise;
  hom.provider = c.provider;
  if (name == "cr") return compression_ratio(corpus, c.compression);
  if (name == "cr_pos") {
    if (c.tagger) return pos_compression_ratio(corpus, *c.tagger, c.compression);
    return pos_compression_ratio(corpus, BuiltinTagger(), c.compression);
  }
  if (name == "ngd") return ngram_diversity(corpus, c.ngd);
  if (name == "mattr") return mattr(corpus, c.mattr);
  if (name == "hdd") {
    HddParams params = c.hdd;
    params.sample = std::min(params.sample, corpus.token_count());
    return hdd(corpus, params);
  }
  if (name == "self_rep") return self_repetition(corpus, c.self_rep).score;
  if (name == "self_bleu") {
    SimilarityKind sim = SimilarityKind::make_bleu();
    sim.bleu = c.bleu;
    return homogenization(corpus, sim, hom);
  }
  if (name == "hom_rougel") {
    SimilarityKind sim = SimilarityKind::make_rouge_l();
    sim.rouge_beta = c.rouge_beta;
    return homogenization(corpus, sim, hom);
  }
  if (name == "hom_embed") return homogenization(corpus, SimilarityKind::make_embed_cosine(), hom);
  if (name == "remote_clique") return remote_clique(corpus, *c.provider);
  if (name == "chamfer") return chamfer_dist(corpus, *c.provider);
  throw InputError("unknown metric '" + std::string(name) + "'");
}

}  // namespace detail

/// One metric with its gating: too few documents or an exceeded pair budget
/// give Skipped, a missing embedding provider gives Unavailable, and any
/// error raised while computing gives Failed. Never throws for those cases.
inline MetricEntry compute_metric(std::string_view name, const Corpus& corpus, const MetricsConfig& config) {
  if (!is_metric_name(name)) throw InputError("unknown metric '" + std::string(name) + "'");
  MetricEntry entry;
  entry.name = std::string(name);
  entry.params = detail::metric_params(name, config);

  const std::size_t n = corpus.size();
  const std::size_t pairs = n < 2 ? 0 : n * (n - 1) / 2;
  if ((is_pairwise_metric(name) || name == "self_rep") && n < 2) {
    entry.status = MetricStatus::Skipped;
    entry.reason = "needs at least 2 documents";
    return entry;
  }
  if (needs_embeddings(name) && config.provider == nullptr) {
    entry.status = MetricStatus::Unavailable;
    entry.reason = "no embedding provider configured";
    return entry;
  }
  if (is_pairwise_metric(name) && !config.force && pairs > config.pair_budget) {
    entry.status = MetricStatus::Skipped;
    entry.reason = std::to_string(pairs) + " pairs exceed the budget of " + std::to_string(config.pair_budget) +
                   " (use --force)";
    return entry;
  }

  if (name == "hdd" && corpus.token_count() < config.hdd.sample) {
    // Report-level leniency: a short corpus is scored with a reduced sample.
    entry.params["sample"] = corpus.token_count();
    entry.params["requested_sample"] = config.hdd.sample;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    entry.value = detail::run_metric(name, corpus, config);
  } catch (const PreconditionError& e) {
    entry.status = MetricStatus::Skipped;
    entry.reason = e.what();
  } catch (const std::exception& e) {
    entry.status = MetricStatus::Failed;
    entry.reason = e.what();
  }
  entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return entry;
}

/// Every configured metric plus corpus statistics. Metric failures are
/// recorded per entry.
inline MetricReport compute_all_metrics(const Corpus& corpus, const MetricsConfig& config = {}) {
  if (corpus.empty()) throw PreconditionError("cannot report on an empty corpus");
  MetricReport report;
  report.corpus_id = corpus.source().path.empty() ? "<memory>" : corpus.source().path;
  report.doc_count = corpus.size();
  report.token_count = corpus.token_count();
  report.avg_length = avg_length(corpus);
  for (const std::string& name : config.metrics()) report.entries.push_back(compute_metric(name, corpus, config));

  const std::vector<std::string> wanted = config.metrics();
  const auto uses = [&](std::string_view m) { return std::find(wanted.begin(), wanted.end(), m) != wanted.end(); };
  const std::size_t bytes = concat(corpus).size();
  if (uses("cr") && bytes < kTinyInputBytes) {
    report.flags.push_back("tiny_input: " + std::to_string(bytes) +
                           " bytes, compression container overhead dominates CR");
  }
  if (uses("hdd") && report.token_count < config.hdd.sample && report.token_count > 0) {
    report.flags.push_back("hdd_sample_reduced: " + std::to_string(report.token_count) + " tokens < sample " +
                           std::to_string(config.hdd.sample));
  }
  return report;
}

// ---------------------------------------------------------------- rendering

inline std::string format_number(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

/// JSON report. Timings are omitted unless asked for so that repeated runs
/// serialize identically.
inline nlohmann::json to_json(const MetricReport& r, bool include_timings = false) {
  nlohmann::json scores = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json skipped = nlohmann::json::object();
  nlohmann::json timings = nlohmann::json::object();
  for (const MetricEntry& e : r.entries) {
    params[e.name] = e.params;
    if (e.status == MetricStatus::Ok) {
      scores[e.name] = *e.value;
    } else {
      skipped[e.name] = {{"status", status_name(e.status)}, {"reason", e.reason}};
    }
    timings[e.name] = e.seconds;
  }
  nlohmann::json out{{"corpus_id", r.corpus_id},   {"doc_count", r.doc_count}, {"token_count", r.token_count},
                     {"avg_length", r.avg_length}, {"scores", scores},         {"params", params},
                     {"skipped", skipped},         {"flags", r.flags}};
  if (include_timings) out["timings"] = timings;
  return out;
}

inline MetricReport report_from_json(const nlohmann::json& j) {
  try {
    MetricReport r;
    r.corpus_id = j.value("corpus_id", std::string());
    r.doc_count = j.value("doc_count", std::size_t{0});
    r.token_count = j.value("token_count", std::size_t{0});
    r.avg_length = j.at("avg_length").get<double>();
    r.flags = j.value("flags", std::vector<std::string>());
    const nlohmann::json none = nlohmann::json::object();
    const nlohmann::json& params = j.contains("params") ? j.at("params") : none;
    const nlohmann::json& timings = j.contains("timings") ? j.at("timings") : none;
    const auto fill = [&](MetricEntry& e) {
      if (params.contains(e.name)) e.params = params.at(e.name);
      if (timings.contains(e.name)) e.seconds = timings.at(e.name).get<double>();
    };
    for (const auto& [name, value] : j.at("scores").items()) {
      MetricEntry e{name, MetricStatus::Ok, value.get<double>(), {}, nlohmann::json::object(), 0.0};
      fill(e);
      r.entries.push_back(std::move(e));
    }
    if (j.contains("skipped")) {
      for (const auto& [name, info] : j.at("skipped").items()) {
        MetricEntry e{name, parse_status(info.at("status").get<std::string>()), std::nullopt,
                      info.value("reason", std::string()), nlohmann::json::object(), 0.0};
        fill(e);
        r.entries.push_back(std::move(e));
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed metric report: ") + e.what());
  }
}

inline std::string to_table(const MetricReport& r) {
  std::size_t width = 10;
  for (const MetricEntry& e : r.entries) width = std::max(width, e.name.size());
  std::ostringstream os;
  os << "corpus     " << r.corpus_id << "\n"
     << "documents  " << r.doc_count << "\n"
     << "avg_length " << format_number(r.avg_length, 2) << " tokens\n\n";
  os << std::left << std::setw(static_cast<int>(width) + 2) << "metric" << std::setw(14) << "value"
     << "time_s  note\n";
  for (const MetricEntry& e : r.entries) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << e.name;
    if (e.status == MetricStatus::Ok) {
      os << std::setw(14) << format_number(*e.value) << std::setw(8) << format_number(e.seconds, 3) << "\n";
    } else {
      os << std::setw(14) << status_name(e.status) << std::setw(8) << "-" << e.reason << "\n";
    }
  }
  for (const std::string& f : r.flags) os << "warning: " << f << "\n";
  return os.str();
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string to_csv(const MetricReport& r) {
  std::ostringstream os;
  os << "metric,value,status,reason\n";
  os << "avg_length," << std::setprecision(17) << r.avg_length << ",ok,\n";
  for (const MetricEntry& e : r.entries) {
    os << e.name << ',';
    if (e.value) os << std::setprecision(17) << *e.value;
    os << ',' << status_name(e.status) << ',' << detail::csv_field(e.reason) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- correlation

enum class CorrelationMethod { Pearson, Spearman };

inline CorrelationMethod parse_correlation_method(std::string_view s) {
  if (s == "pearson") return CorrelationMethod::Pearson;
  if (s == "spearman") return CorrelationMethod::Spearman;
  throw InputError("unknown correlation method '" + std::string(s) + "'");
}

inline std::string_view method_name(CorrelationMethod m) {
  return m == CorrelationMethod::Spearman ? "spearman" : "pearson";
}

struct CorrelationMatrix {
  CorrelationMethod method = CorrelationMethod::Pearson;
  std::vector<std::string> metrics;
  std::vector<std::vector<std::optional<double>>> values;  // nullopt = undefined (constant column)
  std::vector<std::string> warnings;

  std::optional<double> at(std::string_view a, std::string_view b) const {
    const auto ia = std::find(metrics.begin(), metrics.end(), a);
    const auto ib = std::find(metrics.begin(), metrics.end(), b);
    if (ia == metrics.end() || ib == metrics.end()) throw InputError("metric not in matrix");
    return values[static_cast<std::size_t>(ia - metrics.begin())][static_cast<std::size_t>(ib - metrics.begin())];
  }
};

inline constexpr std::size_t kMinSystems = 3;
inline constexpr std::size_t kFewSystems = 10;

/// Average ranks (1-based), ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

/// Pearson correlation, nullopt when either column is constant.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("pearson needs two equal columns of >= 2 values");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// `table[s][m]` is metric m of system s.
inline CorrelationMatrix correlate(std::span<const std::string> metrics, const std::vector<std::vector<double>>& table,
                                   CorrelationMethod method = CorrelationMethod::Pearson) {
  if (table.size() < kMinSystems) {
    throw PreconditionError("correlation needs at least " + std::to_string(kMinSystems) + " systems, got " +
                            std::to_string(table.size()));
  }
  CorrelationMatrix out;
  out.method = method;
  out.metrics.assign(metrics.begin(), metrics.end());
  const std::size_t m = metrics.size();
  std::vector<std::vector<double>> columns(m, std::vector<double>(table.size()));
  for (std::size_t s = 0; s < table.size(); ++s) {
    if (table[s].size() != m) throw InputError("score table row " + std::to_string(s) + " has the wrong width");
    for (std::size_t k = 0; k < m; ++k) columns[k][s] = table[s][k];
  }
  if (method == CorrelationMethod::Spearman) {
    for (auto& c : columns) c = average_ranks(c);
  }
  if (table.size() < kFewSystems) {
    out.warnings.push_back("only " + std::to_string(table.size()) + " systems; correlations are noisy below " +
                           std::to_string(kFewSystems));
  }
  out.values.assign(m, std::vector<std::optional<double>>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const bool constant = std::all_of(columns[i].begin(), columns[i].end(),
                                      [&](double v) { return v == columns[i].front(); });
    if (constant) out.warnings.push_back("metric '" + out.metrics[i] + "' is constant across systems; undefined");
    out.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      out.values[i][j] = out.values[j][i] = pearson(columns[i], columns[j]);
    }
  }
  return out;
}

/// Correlation across system reports. `metrics` empty = metrics scored in
/// every report.
inline CorrelationMatrix correlate(std::span<const MetricReport> reports,
                                   CorrelationMethod method = CorrelationMethod::Pearson,
                                   std::vector<std::string> metrics = {}) {
  if (reports.size() < kMinSystems) {
    throw PreconditionError("correlation needs at least " + std::to_string(kMinSystems) + " systems, got " +
                            std::to_string(reports.size()));
  }
  if (metrics.empty()) {
    for (const std::string& name : all_metric_names()) {
      if (std::all_of(reports.begin(), reports.end(), [&](const MetricReport& r) { return r.score(name); })) {
        metrics.push_back(name);
      }
    }
    if (metrics.empty()) throw InputError("no metric is scored in every report");
  }
  std::vector<std::vector<double>> table;
  for (const MetricReport& r : reports) {
    std::vector<double> row;
    for (const std::string& m : metrics) {
      const auto v = r.score(m);
      if (!v) throw InputError("report '" + r.corpus_id + "' has no score for '" + m + "'");
      row.push_back(*v);
    }
    table.push_back(std::move(row));
  }
  CorrelationMatrix out = correlate(metrics, table, method);
  const bool confounded = std::any_of(reports.begin(), reports.end(), [&](const MetricReport& r) {
    return std::abs(r.avg_length - reports.front().avg_length) > 1e-9;
  });
  if (confounded) {
    out.warnings.push_back("length_confound: systems differ in avg_length; consider truncate_to_shortest");
  }
  return out;
}

inline nlohmann::json to_json(const CorrelationMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m.values) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& v : row) r.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    rows.push_back(std::move(r));
  }
  return {{"method", method_name(m.method)}, {"metrics", m.metrics}, {"matrix", rows}, {"warnings", m.warnings}};
}

inline std::string to_csv(const CorrelationMatrix& m) {
  std::ostringstream os;
  os << "metric";
  for (const std::string& name : m.metrics) os << ',' << name;
  os << "\n";
  for (std::size_t i = 0; i < m.metrics.size(); ++i) {
    os << m.metrics[i];
    for (const auto& v : m.values[i]) {
      os << ',';
      if (v) os << std::setprecision(17) << *v;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace textdiv
