#pragma once

// Command-line front end. Exit codes: 0 success, 1 partial (some metric
// skipped or failed), 2 fatal error, 64 usage error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "textdiv/analysis.hpp"
#include "textdiv/corpus.hpp"
#include "textdiv/embedding.hpp"
#include "textdiv/embedding_remote.hpp"
#include "textdiv/patterns.hpp"
#include "textdiv/service.hpp"
#include "textdiv/taggers.hpp"

namespace textdiv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitFatal = 2;
inline constexpr int kExitUsage = 64;

namespace cli {

struct InputArgs {
  std::string path;
  std::string format = "auto";
  std::string field = "text";
  std::string id_field = "id";

  void add(CLI::App& app) {
    app.add_option("input", path, "Corpus file")->required();
    add_format(app);
  }

  void add_format(CLI::App& app) {
    app.add_option("--input-format", format, "Corpus format")
        ->check(CLI::IsMember({"auto", "lines", "jsonl", "csv", "pretagged"}));
    app.add_option("--field", field, "Text field for jsonl/csv input");
    app.add_option("--id-field", id_field, "Id field for jsonl/csv input");
  }

  Corpus load(const std::string& file) const {
    LoadOptions options;
    options.format = format == "auto" ? format_from_path(file) : parse_format(format);
    options.field = field;
    options.id_field = id_field;
    return parse_corpus(read_file(file), options, file);
  }

  Corpus load() const { return load(path); }
};

struct TaggerArgs {
  std::string kind = "builtin";
  std::string lexicon;
  std::string command;
  std::string endpoint;
  bool concurrent = false;

  void add(CLI::App& app) {
    app.add_option("--tagger", kind, "POS tagger")->check(CLI::IsMember({"builtin", "pretagged", "external"}));
    app.add_option("--lexicon", lexicon, "Alternative lexicon file for the builtin tagger");
    app.add_option("--tagger-command", command, "External tagger command (NDJSON over stdin/stdout)");
    app.add_option("--tagger-endpoint", endpoint, "External tagger HTTP endpoint");
    app.add_flag("--tagger-concurrent", concurrent, "External HTTP tagger accepts concurrent calls");
  }

  TaggerSpec spec() const {
    TaggerSpec s;
    if (kind == "pretagged") s.kind = TaggerSpec::Kind::Pretagged;
    if (kind == "external") s.kind = TaggerSpec::Kind::External;
    s.lexicon_path = lexicon;
    s.command = command;
    s.endpoint = endpoint;
    s.concurrency_safe = concurrent;
    return s;
  }

  /// Pretagged input always uses its own tags.
  std::unique_ptr<Tagger> make(const Corpus& corpus) const {
    if (corpus.tagged() && kind == "builtin" && lexicon.empty()) return std::make_unique<PretaggedTagger>();
    return make_tagger(spec());
  }
};

struct EmbedArgs {
  std::string kind = "none";
  std::size_t dim = 64;
  std::string endpoint;
  std::string model;
  std::string token;
  std::size_t batch = 64;

  void add(CLI::App& app) {
    app.add_option("--embed", kind, "Embedding provider")->check(CLI::IsMember({"none", "stub", "remote"}));
    app.add_option("--embed-dim", dim, "Stub embedding dimension")->check(CLI::PositiveNumber);
    app.add_option("--embed-endpoint", endpoint, "Remote endpoint (default: $TEXTDIV_EMBED_ENDPOINT)");
    app.add_option("--embed-model", model, "Remote model id (default: $TEXTDIV_EMBED_MODEL)");
    app.add_option("--embed-token", token, "Remote bearer token (default: $TEXTDIV_EMBED_TOKEN)");
    app.add_option("--embed-batch", batch, "Texts per remote request")->check(CLI::PositiveNumber);
  }

  std::unique_ptr<EmbeddingProvider> make(std::uint64_t seed) const {
    if (kind == "stub") return std::make_unique<StubEmbeddingProvider>(dim, seed);
    if (kind != "remote") return nullptr;
    RemoteEmbeddingConfig c = RemoteEmbeddingConfig::from_env().value_or(RemoteEmbeddingConfig{});
    if (!endpoint.empty()) c.endpoint = endpoint;
    if (!model.empty()) c.model = model;
    if (!token.empty()) c.token = token;
    c.batch_size = batch;
    if (c.endpoint.empty()) throw InputError("--embed remote needs --embed-endpoint or TEXTDIV_EMBED_ENDPOINT");
    return std::make_unique<RemoteEmbeddingProvider>(c);
  }
};

inline void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + out_path + "'");
  file << text;
}

inline void check_pattern_length(std::size_t n, bool ui_bounds) {
  if (ui_bounds) {
    check_ui_bounds(n, "n");
  } else if (n < 1 || n > kUiMaxLength) {
    throw PreconditionError("n must be in [1, 10], got " + std::to_string(n));
  }
}

}  // namespace cli

/// Runs the command line; never calls exit().
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Corpus-level text diversity scores, pattern search and length control.", "textdiv"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "textdiv 1.0.0");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Compute every diversity score for one corpus");
  cli::InputArgs m_in;
  cli::TaggerArgs m_tag;
  cli::EmbedArgs m_embed;
  MetricsConfig m_cfg;
  std::string m_format = "table";
  std::string m_out;
  std::string m_compressor = "gzip";
  std::string m_norm = "mean-pairs";
  std::vector<std::string> m_only;
  bool m_concat = false;
  bool m_lower = false;
  bool m_timings = false;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  m_in.add(*metrics);
  metrics->add_option("--format", m_format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}));
  metrics->add_option("--out", m_out, "Write the report here instead of stdout");
  metrics->add_option("--only", m_only, "Comma-separated metric subset")->delimiter(',');
  metrics->add_option("--ngd-max-n", m_cfg.ngd.max_n, "Largest n for n-gram diversity")->check(CLI::PositiveNumber);
  metrics->add_option("--mattr-window", m_cfg.mattr.window, "MATTR window in tokens")->check(CLI::PositiveNumber);
  metrics->add_option("--hdd-sample", m_cfg.hdd.sample, "HD-D sample size")->check(CLI::PositiveNumber);
  metrics->add_option("--selfrep-n", m_cfg.self_rep.n, "Self-repetition n-gram length")->check(CLI::PositiveNumber);
  metrics->add_flag("--concat-strict", m_concat, "NGD and MATTR over the literal concatenation");
  metrics->add_flag("--lowercase", m_lower, "Lowercase tokens for token-based scores");
  metrics->add_option("--compressor", m_compressor, "Compressor")->check(CLI::IsMember({"gzip", "zstd"}));
  metrics->add_option("--level", m_cfg.compression.level, "Compression level");
  metrics->add_option("--bleu-max-order", m_cfg.bleu.max_order, "BLEU max n-gram order")->check(CLI::PositiveNumber);
  metrics->add_option("--bleu-epsilon", m_cfg.bleu.epsilon, "BLEU value substituted for zero precisions");
  metrics->add_option("--rouge-beta", m_cfg.rouge_beta, "ROUGE-L F-measure beta");
  metrics->add_option("--normalization", m_norm, "Homogenization normalization")
      ->check(CLI::IsMember({"mean-pairs", "literal"}));
  metrics->add_option("--pair-budget", m_cfg.pair_budget, "Max document pairs per pairwise metric");
  metrics->add_flag("--force", m_cfg.force, "Run pairwise metrics over the pair budget");
  metrics->add_flag("--timings", m_timings, "Include per-metric wall times in JSON output");
  metrics->add_option("--workers", workers, "Worker threads (0 = all CPUs)");
  metrics->add_option("--seed", seed, "Seed for the stub embedder");
  m_tag.add(*metrics);
  m_embed.add(*metrics);

  // patterns
  auto* patterns = app.add_subcommand("patterns", "Extract recurring POS patterns");
  cli::InputArgs p_in;
  cli::TaggerArgs p_tag;
  PatternOptions p_opts;
  std::string p_out;
  bool p_ui = false;
  p_in.add(*patterns);
  patterns->add_option("-n,--length", p_opts.n, "Pattern length in tags");
  patterns->add_option("--top", p_opts.top_n, "Patterns to keep")->check(CLI::PositiveNumber);
  patterns->add_option("--min-docs", p_opts.min_docs, "Minimum documents containing a pattern")
      ->check(CLI::PositiveNumber);
  patterns->add_flag("--ui-bounds", p_ui, "Restrict n to the UI range [2, 10]");
  patterns->add_option("--out", p_out, "Write the index here instead of stdout");
  p_tag.add(*patterns);

  // match
  auto* match = app.add_subcommand("match", "Find indexed POS patterns in one document");
  cli::InputArgs x_in;
  cli::TaggerArgs x_tag;
  PatternOptions x_opts;
  std::size_t x_doc = 0;
  std::string x_index;
  std::string x_out;
  x_in.add(*match);
  match->add_option("--doc", x_doc, "Zero-based document index");
  match->add_option("--index", x_index, "Pattern index JSON (built from the corpus when omitted)");
  match->add_option("-n,--length", x_opts.n, "Pattern length when building the index");
  match->add_option("--top", x_opts.top_n, "Patterns to keep when building the index");
  match->add_option("--min-docs", x_opts.min_docs, "Minimum documents when building the index");
  match->add_option("--out", x_out, "Write matches here instead of stdout");
  x_tag.add(*match);

  // exact
  auto* exact = app.add_subcommand("exact", "Find token strings repeated across documents");
  cli::InputArgs e_in;
  std::size_t e_n = 4;
  std::size_t e_min_docs = 2;
  bool e_lower = false;
  bool e_ui = false;
  std::string e_out;
  e_in.add(*exact);
  exact->add_option("-n,--length", e_n, "String length in tokens");
  exact->add_option("--min-docs", e_min_docs, "Minimum documents containing the string");
  exact->add_flag("--lowercase", e_lower, "Match case-insensitively");
  exact->add_flag("--ui-bounds", e_ui, "Restrict both values to the UI range [2, 10]");
  exact->add_option("--out", e_out, "Write the index here instead of stdout");

  // truncate
  auto* truncate = app.add_subcommand("truncate", "Truncate aligned system outputs to the shortest per input");
  cli::InputArgs t_in;
  std::vector<std::string> t_systems;
  std::string t_out_dir;
  truncate->add_option("--system", t_systems, "System as name=path (repeat)")->required();
  truncate->add_option("--out-dir", t_out_dir, "Directory for the truncated <name>.jsonl files")->required();
  t_in.add_format(*truncate);

  // correlate
  auto* correlate_cmd = app.add_subcommand("correlate", "Correlate metric scores across system reports");
  std::vector<std::string> c_reports;
  std::string c_method = "pearson";
  std::vector<std::string> c_metrics;
  std::string c_format = "csv";
  std::string c_out;
  correlate_cmd->add_option("reports", c_reports, "JSON reports written by 'metrics --format json'")->required();
  correlate_cmd->add_option("--method", c_method, "Correlation")->check(CLI::IsMember({"pearson", "spearman"}));
  correlate_cmd->add_option("--metrics", c_metrics, "Comma-separated metrics (default: all shared)")->delimiter(',');
  correlate_cmd->add_option("--format", c_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  correlate_cmd->add_option("--out", c_out, "Write the matrix here instead of stdout");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  ServiceConfig s_cfg;
  cli::TaggerArgs s_tag;
  cli::EmbedArgs s_embed;
  std::string s_host = "127.0.0.1";
  int s_port = 8080;
  std::string s_demo;
  long long s_ttl = 3600;
  serve->add_option("--host", s_host, "Bind address");
  serve->add_option("--port", s_port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--demo", s_demo, "Directory of demo datasets");
  serve->add_option("--max-upload", s_cfg.max_upload_bytes, "Upload size limit in bytes");
  serve->add_option("--ttl", s_ttl, "Session lifetime in seconds")->check(CLI::PositiveNumber);
  serve->add_option("--cors-origin", s_cfg.cors_origin, "Access-Control-Allow-Origin value");
  serve->add_option("--pair-budget", s_cfg.pair_budget, "Max document pairs per pairwise metric");
  serve->add_option("--workers", s_cfg.workers, "Worker threads (0 = all CPUs)");
  serve->add_option("--seed", seed, "Seed for the stub embedder");
  s_tag.add(*serve);
  s_embed.add(*serve);

  // tag
  auto* tag_cmd = app.add_subcommand("tag", "Print the corpus as token/TAG lines");
  cli::InputArgs g_in;
  cli::TaggerArgs g_tag;
  std::string g_out;
  g_in.add(*tag_cmd);
  g_tag.add(*tag_cmd);
  tag_cmd->add_option("--out", g_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {  // --help, --version
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (print_config) {
    out << app.config_to_str(true, false);
    return kExitOk;
  }

  try {
    if (metrics->parsed()) {
      const Corpus corpus = m_in.load();
      m_cfg.only = m_only;
      m_cfg.compression.algorithm = parse_compressor(m_compressor);
      m_cfg.normalization = parse_normalization(m_norm);
      const Boundary boundary = m_concat ? Boundary::Concatenated : Boundary::PerDocument;
      m_cfg.ngd.boundary = m_cfg.mattr.boundary = boundary;
      m_cfg.ngd.lowercase = m_cfg.mattr.lowercase = m_cfg.hdd.lowercase = m_cfg.self_rep.lowercase = m_lower;
      m_cfg.pairwise.workers = workers;
      const auto tagger = m_tag.make(corpus);
      const auto provider = m_embed.make(seed);
      m_cfg.tagger = tagger.get();
      m_cfg.provider = provider.get();
      const MetricReport report = compute_all_metrics(corpus, m_cfg);
      std::string text;
      if (m_format == "json") {
        text = to_json(report, m_timings).dump(2) + "\n";
      } else if (m_format == "csv") {
        text = to_csv(report);
      } else {
        text = to_table(report);
      }
      cli::write_output(text, m_out, out);
      return report.partial() ? kExitPartial : kExitOk;
    }

    if (patterns->parsed()) {
      cli::check_pattern_length(p_opts.n, p_ui);
      const Corpus corpus = p_in.load();
      const auto tagger = p_tag.make(corpus);
      cli::write_output(to_json(extract_patterns(corpus, *tagger, p_opts)).dump(2) + "\n", p_out, out);
      return kExitOk;
    }

    if (match->parsed()) {
      const Corpus corpus = x_in.load();
      const auto tagger = x_tag.make(corpus);
      if (x_doc >= corpus.size()) {
        throw PreconditionError("--doc " + std::to_string(x_doc) + " is out of range for " +
                                std::to_string(corpus.size()) + " documents");
      }
      PatternIndex index;
      if (!x_index.empty()) {
        try {
          index = pattern_index_from_json(nlohmann::json::parse(read_file(x_index)));
        } catch (const nlohmann::json::exception& e) {
          throw InputError("cannot parse index '" + x_index + "': " + e.what());
        }
      } else {
        cli::check_pattern_length(x_opts.n, false);
        index = extract_patterns(corpus, *tagger, x_opts);
      }
      nlohmann::json list = nlohmann::json::array();
      for (const PatternMatch& m : match_patterns(corpus[x_doc], index, *tagger)) {
        list.push_back({{"pattern", join(m.pattern)}, {"text", m.text}, {"start", m.start}, {"end", m.end}});
      }
      cli::write_output(list.dump(2) + "\n", x_out, out);
      return kExitOk;
    }

    if (exact->parsed()) {
      cli::check_pattern_length(e_n, e_ui);
      if (e_ui) check_ui_bounds(e_min_docs, "--min-docs");
      const Corpus corpus = e_in.load();
      cli::write_output(to_json(exact_matches(corpus, e_n, e_min_docs, e_lower)).dump(2) + "\n", e_out, out);
      return kExitOk;
    }

    if (truncate->parsed()) {
      SystemGroup group;
      for (const std::string& spec : t_systems) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
          throw InputError("--system expects name=path, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        if (!group.systems.emplace(name, t_in.load(spec.substr(eq + 1))).second) {
          throw InputError("system '" + name + "' given twice");
        }
      }
      const SystemGroup truncated = truncate_to_shortest(group);
      std::filesystem::create_directories(t_out_dir);
      out << "system\tdocs\tavg_length_before\tavg_length_after\n";
      for (const auto& [name, corpus] : truncated.systems) {
        std::string lines;
        for (const Document& d : corpus) lines += nlohmann::json{{"id", d.id()}, {"text", d.text()}}.dump() + "\n";
        cli::write_output(lines, (std::filesystem::path(t_out_dir) / (name + ".jsonl")).string(), out);
        out << name << '\t' << corpus.size() << '\t' << format_number(avg_length(group.systems.at(name)), 4) << '\t'
            << format_number(avg_length(corpus), 4) << "\n";
      }
      return kExitOk;
    }

    if (correlate_cmd->parsed()) {
      std::vector<MetricReport> reports;
      for (const std::string& path : c_reports) {
        try {
          MetricReport r = report_from_json(nlohmann::json::parse(read_file(path)));
          if (r.corpus_id.empty()) r.corpus_id = path;
          reports.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
          throw InputError("cannot parse report '" + path + "': " + e.what());
        }
      }
      const CorrelationMatrix m = correlate(reports, parse_correlation_method(c_method), c_metrics);
      for (const std::string& w : m.warnings) err << "warning: " << w << "\n";
      cli::write_output(c_format == "json" ? to_json(m).dump(2) + "\n" : to_csv(m), c_out, out);
      return kExitOk;
    }

    if (serve->parsed()) {
      const auto provider = s_embed.make(seed);
      s_cfg.provider = provider.get();
      s_cfg.demo_dir = s_demo;
      s_cfg.ttl = std::chrono::seconds(s_ttl);
      s_cfg.tagger = s_tag.spec();
      Service service(s_cfg);
      if (!s_demo.empty() && !std::filesystem::is_directory(s_demo)) {
        throw InputError("demo directory '" + s_demo + "' does not exist");
      }
      err << "textdiv: serving on http://" << s_host << ":" << s_port << " (" << service.demos().size()
          << " demo datasets)\n";
      if (!service.listen(s_host, s_port)) throw Error("cannot listen on " + s_host + ":" + std::to_string(s_port));
      return kExitOk;
    }

    if (tag_cmd->parsed()) {
      const Corpus corpus = g_in.load();
      const auto tagger = g_tag.make(corpus);
      std::string text;
      for (const Document& d : corpus) {
        const std::vector<std::string> tags = tags_for(d, *tagger);
        for (std::size_t i = 0; i < tags.size(); ++i) {
          if (i) text += ' ';
          text += d.tokens()[i] + "/" + tags[i];
        }
        text += "\n";
      }
      cli::write_output(text, g_out, out);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "textdiv: error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}

}  // namespace textdiv
