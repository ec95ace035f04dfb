#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "textdiv/cli.hpp"

using namespace textdiv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "textdiv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("textdiv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

  fs::path dir_;
};

const char* const kThree =
    "I enjoy walking with my cute dog...\nI enjoy walking outside...\nI enjoy walking in the sunny park...\n";

}  // namespace

TEST_F(CliTest, MetricsJsonOnThreeTexts) {
  const auto r = run({"metrics", write("three.txt", kThree), "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("doc_count"), 3);
  EXPECT_NEAR(j.at("scores").at("cr").get<double>(), 99.0 / 87.0, 1e-12);
  EXPECT_EQ(j.at("skipped").at("hom_embed").at("status"), "unavailable");
  EXPECT_FALSE(j.contains("timings"));
}

TEST_F(CliTest, MetricsWithStubEmbedder) {
  const auto r = run({"metrics", write("three.txt", kThree), "--format", "json", "--embed", "stub"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("scores").contains("remote_clique"));
  EXPECT_TRUE(j.at("skipped").empty());
}

TEST_F(CliTest, OneDocumentIsPartial) {
  const auto r = run({"metrics", write("one.txt", "a single short document\n"), "--format", "json"});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("skipped").at("self_bleu").at("status"), "skipped");
  EXPECT_FALSE(j.at("skipped").at("self_bleu").at("reason").get<std::string>().empty());
}

TEST_F(CliTest, TableAndCsvFormats) {
  const std::string in = write("three.txt", kThree);
  const auto t = run({"metrics", in});
  EXPECT_NE(t.out.find("ngd"), std::string::npos);
  const auto c = run({"metrics", in, "--format", "csv", "--only", "cr,ngd"});
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out.substr(0, c.out.find('\n')), "metric,value,status,reason");
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 4) << c.out;  // header, avg_length, cr, ngd
}

TEST_F(CliTest, OutFileAndDeterminism) {
  const std::string in = write("three.txt", kThree);
  const std::string a = (dir_ / "a.json").string(), b = (dir_ / "b.json").string();
  EXPECT_EQ(run({"metrics", in, "--format", "json", "--out", a, "--embed", "stub"}).code, 0);
  EXPECT_EQ(run({"metrics", in, "--format", "json", "--out", b, "--embed", "stub", "--workers", "4"}).code, 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, ParameterFlagsReachParams) {
  const auto r = run({"metrics", write("three.txt", kThree), "--format", "json", "--ngd-max-n", "2",
                      "--concat-strict", "--normalization", "literal", "--level", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("params").at("ngd").at("max_n"), 2);
  EXPECT_EQ(j.at("params").at("ngd").at("boundary"), "concatenated");
  EXPECT_EQ(j.at("params").at("self_bleu").at("normalization"), "literal");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"metrics"}).code, kExitUsage);
  EXPECT_EQ(run({"metrics", "x.txt", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(run({"metrics", "x.txt", "--format", "xml"}).code, kExitUsage);
}

TEST_F(CliTest, FatalErrors) {
  const auto missing = run({"metrics", (dir_ / "missing.txt").string()});
  EXPECT_EQ(missing.code, kExitFatal);
  EXPECT_NE(missing.err.find("textdiv: error:"), std::string::npos);
  EXPECT_EQ(run({"metrics", write("three.txt", kThree), "--only", "bogus"}).code, kExitFatal);
  const auto bad = run({"metrics", write("bad.jsonl", "{\"text\": \"ok\"}\nnot json\n")});
  EXPECT_EQ(bad.code, kExitFatal);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;
}

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("textdiv"), std::string::npos);
}

TEST_F(CliTest, MetricsHelpMatchesGolden) {
  const auto r = run({"metrics", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(fs::path(TEXTDIV_TEST_DATA) / "golden" / "metrics_help.txt"));
}

TEST_F(CliTest, PrintConfig) {
  const auto r = run({"--print-config", "metrics", "in.txt"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("mattr-window=50"), std::string::npos) << r.out;
}

TEST_F(CliTest, PatternsAndMatch) {
  const std::string in = write("three.txt", kThree);
  const auto p = run({"patterns", in, "-n", "3", "--min-docs", "2"});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto index = nlohmann::json::parse(p.out);
  EXPECT_EQ(index.at("n"), 3);
  EXPECT_FALSE(index.at("patterns").empty());
  const std::string idx = write("index.json", p.out);
  const auto m = run({"match", in, "--doc", "1", "--index", idx});
  ASSERT_EQ(m.code, 0) << m.err;
  const auto matches = nlohmann::json::parse(m.out);
  ASSERT_FALSE(matches.empty());
  EXPECT_EQ(matches[0].at("start"), 0);
  EXPECT_EQ(run({"patterns", in, "-n", "11"}).code, kExitFatal);
  EXPECT_EQ(run({"patterns", in, "-n", "1", "--ui-bounds"}).code, kExitFatal);
  EXPECT_EQ(run({"match", in, "--doc", "9"}).code, kExitFatal);
}

TEST_F(CliTest, Exact) {
  const auto r = run({"exact", write("three.txt", kThree), "-n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("min_docs"), 2);
  const auto& patterns = j.at("patterns");
  const auto it = std::find_if(patterns.begin(), patterns.end(), [](const nlohmann::json& e) {
    return e.at("pattern") == std::vector<std::string>{"I", "enjoy", "walking"};
  });
  ASSERT_NE(it, patterns.end());
  EXPECT_EQ(it->at("doc_count"), 3);
}

TEST_F(CliTest, TruncateWritesPerSystem) {
  const std::string a = write("a.jsonl", "{\"id\":\"0\",\"text\":\"one two three four five six\"}\n"
                                         "{\"id\":\"1\",\"text\":\"x y\"}\n");
  const std::string b = write("b.jsonl", "{\"id\":\"0\",\"text\":\"alpha beta gamma\"}\n"
                                         "{\"id\":\"1\",\"text\":\"p q r s\"}\n");
  const fs::path out = dir_ / "out";
  const auto r = run({"truncate", "--system", "a=" + a, "--system", "b=" + b, "--out-dir", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Corpus ta = load_corpus(out / "a.jsonl");
  const Corpus tb = load_corpus(out / "b.jsonl");
  EXPECT_EQ(ta[0].text(), "one two three");
  EXPECT_EQ(tb[1].text(), "p q");
  EXPECT_NE(r.out.find("avg_length_after"), std::string::npos);
  EXPECT_EQ(run({"truncate", "--system", "broken", "--out-dir", out.string()}).code, kExitFatal);
}

TEST_F(CliTest, CorrelateReports) {
  std::vector<std::string> paths;
  const char* const texts[] = {"a b c d e f g h\na b c x y z q r\n", "a a a b b b c c\nd d d e e e f f\n",
                               "one two three four\nfive six seven eight\n", "x x x x x x x x\nx x x x x x x x\n"};
  for (int i = 0; i < 4; ++i) {
    const std::string in = write("s" + std::to_string(i) + ".txt", texts[i]);
    const std::string report = (dir_ / ("r" + std::to_string(i) + ".json")).string();
    run({"metrics", in, "--format", "json", "--out", report, "--only", "cr,ngd,mattr"});
    paths.push_back(report);
  }
  std::vector<std::string> args{"correlate"};
  args.insert(args.end(), paths.begin(), paths.end());
  const auto csv = run(args);
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "metric,cr,ngd,mattr");
  EXPECT_NE(csv.err.find("warning:"), std::string::npos);
  args.insert(args.end(), {"--format", "json", "--method", "spearman"});
  const auto j = nlohmann::json::parse(run(args).out);
  EXPECT_EQ(j.at("method"), "spearman");
  EXPECT_EQ(run({"correlate", paths[0], paths[1]}).code, kExitFatal);
}

TEST_F(CliTest, TagCommand) {
  const auto r = run({"tag", write("t.txt", "the dog runs\n")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "the/DT dog/NN runs/VBZ\n");
  const auto p = run({"tag", write("p.tagged", "a/DT b/NN\n")});
  EXPECT_EQ(p.out, "a/DT b/NN\n");
}
