#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "textdiv/compression.hpp"
#include "textdiv/corpus.hpp"
#include "textdiv/pos_tagger.hpp"

using namespace textdiv;

namespace {

using Tokens = std::vector<std::string>;

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(TEXTDIV_TEST_DATA) + "/golden/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus parse(std::string_view content, Format format, std::string field = "text") {
  LoadOptions o;
  o.format = format;
  o.field = std::move(field);
  return parse_corpus(content, o);
}

const std::vector<std::string> kThree{"I enjoy walking with my cute dog...", "I enjoy walking outside...",
                                      "I enjoy walking in the sunny park..."};

}  // namespace

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, PunctuationSplitsIntoSingleCharacters) {
  EXPECT_EQ(tokenize("I enjoy walking with my cute dog..."),
            (Tokens{"I", "enjoy", "walking", "with", "my", "cute", "dog", ".", ".", "."}));
}

TEST(Tokenize, ContractionMatchesGolden) {
  std::string golden = read_golden("tokenize_dont_stop.txt");
  Tokens expected;
  std::istringstream in(golden);
  for (std::string line; std::getline(in, line);) expected.push_back(line);
  EXPECT_EQ(tokenize("don't stop"), expected);
}

TEST(Tokenize, CasePreservedAndNoEmptyTokens) {
  const auto t = tokenize("  Hello,\tWORLD!  \n ");
  EXPECT_EQ(t, (Tokens{"Hello", ",", "WORLD", "!"}));
}

TEST(Tokenize, NonAscii) {
  EXPECT_EQ(tokenize("café naïve — über"), (Tokens{"café", "naïve", "—", "über"}));
}

TEST(Tokenize, Deterministic) {
  const std::string text = "Mr. O'Neil's 3.5% rate, e-mail: x@y.z; (really?)";
  EXPECT_EQ(tokenize(text), tokenize(text));
}

TEST(Document, SpansReproduceTokens) {
  const Document d("0", "The  cat, sat.");
  ASSERT_EQ(d.size(), 5u);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.surface(i, i + 1), d.tokens()[i]);
  EXPECT_EQ(d.surface(0, 3), "The  cat,");
}

TEST(Document, TruncatedKeepsPrefix) {
  const Document d("x", "one two three four");
  const Document t = d.truncated(2);
  EXPECT_EQ(t.tokens(), (Tokens{"one", "two"}));
  EXPECT_EQ(t.text(), "one two");
  EXPECT_EQ(t.id(), "x");
  EXPECT_EQ(d.truncated(10).text(), d.text());
}

TEST(Document, TagCountMismatchRejected) {
  const Document d("0", "a b");
  EXPECT_THROW(d.with_tags({"NN"}), TaggerError);
}

TEST(Load, LinesAssignsIndexIds) {
  const Corpus c = parse("alpha\nbeta gamma\ndelta\n", Format::Lines);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].id(), "0");
  EXPECT_EQ(c[1].id(), "1");
  EXPECT_EQ(c[2].id(), "2");
  EXPECT_EQ(c[1].text(), "beta gamma");
}

TEST(Load, CrlfAndBom) {
  const Corpus c = parse("\xEF\xBB\xBFone\r\ntwo\r\n", Format::Lines);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text(), "one");
  EXPECT_EQ(c[1].text(), "two");
}

TEST(Load, JsonlInLineOrderWithOptionalIds) {
  const Corpus c = parse("{\"text\": \"first\"}\n{\"text\": \"second\", \"id\": \"b\"}\n\n{\"text\": \"third\"}\n",
                         Format::Jsonl);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].id(), "0");
  EXPECT_EQ(c[1].id(), "b");
  EXPECT_EQ(c[2].text(), "third");
}

TEST(Load, JsonlCustomField) {
  const Corpus c = parse("{\"summary\": \"x y\"}\n", Format::Jsonl, "summary");
  EXPECT_EQ(c[0].tokens(), (Tokens{"x", "y"}));
}

TEST(Load, JsonlMalformedReportsLine) {
  try {
    parse("{\"text\": \"ok\"}\n{\"text\": oops}\n", Format::Jsonl);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Load, JsonlMissingField) {
  try {
    parse("{\"body\": \"ok\"}\n", Format::Jsonl);
    FAIL();
  } catch (const MissingFieldError& e) {
    EXPECT_EQ(e.field(), "text");
  }
}

TEST(Load, CsvQuotedFields) {
  const Corpus c = parse("id,text\na,\"hello, world\"\nb,\"say \"\"hi\"\"\nthere\"\n", Format::Csv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id(), "a");
  EXPECT_EQ(c[0].text(), "hello, world");
  EXPECT_EQ(c[1].text(), "say \"hi\"\nthere");
}

TEST(Load, CsvMissingColumnNamesIt) {
  try {
    parse("id,body\n1,x\n", Format::Csv, "summary");
    FAIL();
  } catch (const MissingFieldError& e) {
    EXPECT_EQ(e.field(), "summary");
    EXPECT_NE(std::string(e.what()).find("summary"), std::string::npos);
  }
}

TEST(Load, CsvRaggedRowReportsLine) {
  try {
    parse("text,id\nx,1\ny\n", Format::Csv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Load, EmptyCorpusRejected) {
  EXPECT_THROW(parse("", Format::Lines), InputError);
  EXPECT_THROW(parse("\n\n", Format::Lines), InputError);
}

TEST(Load, EmptyDocumentsAllowedAmongOthers) {
  const Corpus c = parse("a\n\nb\n", Format::Lines);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_TRUE(c[1].empty());
}

TEST(Load, InvalidUtf8Rejected) { EXPECT_THROW(parse("ok\n\xC3\x28\n", Format::Lines), InputError); }

TEST(Load, DuplicateIdsRejected) {
  EXPECT_THROW(parse("{\"text\":\"a\",\"id\":1}\n{\"text\":\"b\",\"id\":1}\n", Format::Jsonl), InputError);
}

TEST(Load, PretaggedParsesTokensAndTags) {
  const Corpus c = parse("the/DT dog/NN\n", Format::Pretagged);
  EXPECT_EQ(c[0].tokens(), (Tokens{"the", "dog"}));
  EXPECT_EQ(*c[0].tags(), (Tokens{"DT", "NN"}));
  EXPECT_TRUE(c.tagged());
}

TEST(Load, FromFileAndMissingFile) {
  const auto path = std::filesystem::temp_directory_path() / "textdiv_unit_load.jsonl";
  {
    std::ofstream out(path);
    out << "{\"text\": \"a b\"}\n";
  }
  const Corpus c = load_corpus(path);
  EXPECT_EQ(c.source().format, "jsonl");
  EXPECT_EQ(c.size(), 1u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_corpus(path), InputError);
}

TEST(NGrams, Examples) {
  const Tokens abc{"a", "b", "c"};
  const auto g = ngrams(abc, 2);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].items, (Tokens{"a", "b"}));
  EXPECT_EQ(g[1].items, (Tokens{"b", "c"}));
  EXPECT_TRUE(ngrams(Tokens{"a", "b"}, 4).empty());
  const auto aa = ngrams(Tokens{"a", "a", "a"}, 2);
  EXPECT_EQ(aa.size(), 2u);
  EXPECT_EQ(aa[0], aa[1]);
  EXPECT_THROW(ngrams(abc, 0), PreconditionError);
}

TEST(Concat, Separators) {
  EXPECT_EQ(concat(make_corpus({"ab", "cd"})), "ab\ncd");
  EXPECT_EQ(concat(make_corpus({"solo text"})), "solo text");
  const std::string three = concat(make_corpus(kThree));
  EXPECT_EQ(std::count(three.begin(), three.end(), '\n'), 2);
}

TEST(AvgLength, Examples) {
  EXPECT_DOUBLE_EQ(avg_length(make_corpus({"a b c d", "a b c d e f"})), 5.0);
  EXPECT_DOUBLE_EQ(avg_length(make_corpus({"x y", "x y"})), 2.0);
  EXPECT_DOUBLE_EQ(avg_length(make_corpus({"1 2 3 4 5 6 7"})), 7.0);
  EXPECT_THROW(avg_length(Corpus{}), PreconditionError);
}

// ----------------------------------------------------------------- tagger

TEST(BuiltinTagger, Examples) {
  const BuiltinTagger tagger;
  EXPECT_TRUE(tagger.tag(Tokens{}).empty());
  EXPECT_EQ(tagger.tag(Tokens{"the", "dog", "runs"}), (Tokens{"DT", "NN", "VBZ"}));
  EXPECT_EQ(tagger.id(), "builtin:v1");
}

TEST(BuiltinTagger, EveryTagInTagset) {
  const BuiltinTagger tagger;
  const auto tags = tagger.tag(tokenize("Yesterday, 42 quickly-moving zorbles were jumping over Paris's "
                                         "tallest buildings & she smiled; it's $5!"));
  for (const auto& t : tags) EXPECT_TRUE(is_known_tag(t)) << t;
}

TEST(BuiltinTagger, Deterministic) {
  const BuiltinTagger a, b;
  const auto tokens = tokenize(kThree[0] + " " + kThree[2]);
  EXPECT_EQ(a.tag(tokens), b.tag(tokens));
}

TEST(PretaggedTagger, RejectsUnknownTag) {
  const PretaggedTagger t;
  EXPECT_THROW(t.tag(Tokens{"dog/NOUN"}), TaggerError);
  EXPECT_EQ(t.tag(Tokens{"dog/NN", "a/b/DT"}), (Tokens{"NN", "DT"}));
}

TEST(TagCorpus, AddsTagsWithoutMutatingInput) {
  const Corpus c = make_corpus(kThree);
  const Corpus tagged = tag_corpus(c, BuiltinTagger{});
  EXPECT_FALSE(c.tagged());
  EXPECT_TRUE(tagged.tagged());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(tagged[i].tags()->size(), c[i].size());
}

// ------------------------------------------------------------ compression

TEST(Compression, FixedHeaderGzipMatchesReferenceSizes) {
  // Sizes from Python's gzip.compress(data, compresslevel, mtime=0).
  const Corpus c = make_corpus(kThree);
  EXPECT_DOUBLE_EQ(compression_ratio(c), 99.0 / 87.0);
  std::string rep;
  for (int i = 0; i < 200; ++i) rep += "The quick brown fox jumps over the lazy dog. ";
  EXPECT_EQ(compress(rep, {Compressor::DeflateGzip, 1, true}).size(), 141u);
  EXPECT_EQ(compress(rep, {Compressor::DeflateGzip, 6, true}).size(), 107u);
  EXPECT_EQ(compress(rep, {Compressor::DeflateGzip, 9, true}).size(), 107u);
}

TEST(Compression, RepeatedSentenceTenKilobytes) {
  std::string s;
  for (int i = 0; i < 100; ++i) {
    s += "The committee will meet again next Tuesday to review the budget and the plans for the new library.  ";
  }
  ASSERT_EQ(s.size(), 10000u);
  EXPECT_DOUBLE_EQ(compression_ratio(s, {Compressor::DeflateGzip, 6, true}), 10000.0 / 149.0);
  EXPECT_DOUBLE_EQ(compression_ratio(s, {Compressor::DeflateGzip, 1, true}), 10000.0 / 190.0);
}

TEST(Compression, RandomAlphanumericNearIncompressible) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string s;
  for (int i = 0; i < 10240; ++i) s += alphabet[rng() % alphabet.size()];
  const double cr = compression_ratio(s);
  EXPECT_GE(cr, 0.9);
  EXPECT_LE(cr, 1.5);
}

TEST(Compression, OneByteBelowOne) {
  EXPECT_LT(compression_ratio(make_corpus({"a"})), 1.0);
  EXPECT_LT(pos_compression_ratio(make_corpus({"a"}), BuiltinTagger{}), 1.0);
}

TEST(Compression, GzipStreamIsDecodableAndHeaderFixed) {
  const auto bytes = compress("hello hello hello");
  ASSERT_GE(bytes.size(), 18u);
  EXPECT_EQ(bytes[0], 0x1f);
  EXPECT_EQ(bytes[1], 0x8b);
  for (int i = 4; i < 8; ++i) EXPECT_EQ(bytes[i], 0) << "mtime byte " << i;
}

TEST(Compression, PosStreamLayout) {
  const Corpus c = make_corpus({"the dog runs", "the cat"});
  EXPECT_EQ(pos_stream(c, BuiltinTagger{}), "DT NN VBZ\nDT NN");
}

TEST(Compression, IdenticalTagSequencesBeatShuffledControl) {
  const BuiltinTagger tagger;
  std::vector<std::string> same(60, "the old dog runs quickly to the red house and sleeps .");
  const double templated = pos_compression_ratio(make_corpus(same), tagger);

  std::mt19937_64 rng(3);
  std::string tagged_line;
  std::vector<std::string> lines;
  auto base = tagger.tag(tokenize(same[0]));
  for (std::size_t i = 0; i < same.size(); ++i) {
    auto tags = base;
    std::shuffle(tags.begin(), tags.end(), rng);
    std::string line;
    for (const auto& t : tags) line += (line.empty() ? "" : " ") + std::string("w/") + t;
    lines.push_back(line);
  }
  std::string content;
  for (const auto& l : lines) content += l + "\n";
  LoadOptions o;
  o.format = Format::Pretagged;
  const double shuffled = pos_compression_ratio(parse_corpus(content, o), PretaggedTagger{});
  EXPECT_GT(templated, shuffled);
}

TEST(Compression, Deterministic) {
  const Corpus c = make_corpus(kThree);
  EXPECT_EQ(compress(concat(c)), compress(concat(c)));
}

TEST(Compression, UnknownCompressorRejected) { EXPECT_THROW(parse_compressor("lzma"), InputError); }
