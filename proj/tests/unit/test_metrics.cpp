#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "../oracles.hpp"
#include "textdiv/embedding.hpp"
#include "textdiv/ngram_metrics.hpp"
#include "textdiv/pairwise.hpp"
#include "textdiv/similarity.hpp"

using namespace textdiv;

namespace {

using Tokens = std::vector<std::string>;

std::vector<Tokens> token_streams(const Corpus& c) {
  std::vector<Tokens> out;
  for (const auto& d : c) out.push_back(d.tokens());
  return out;
}

/// Returns fixed vectors keyed by text.
class TableProvider final : public EmbeddingProvider {
 public:
  explicit TableProvider(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
  std::string model_id() const override { return "table"; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) out.push_back({table_.at(t), "table"});
    return out;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

}  // namespace

// ------------------------------------------------------------------- NGD

TEST(Ngd, AllDistinctIsMaxN) {
  EXPECT_NEAR(ngram_diversity(make_corpus({"a b c d e"})), 4.0, 1e-12);
}

TEST(Ngd, SingleRepeatedToken) {
  EXPECT_NEAR(ngram_diversity(make_corpus({"a a a a a"})), 1.0 / 5 + 1.0 / 4 + 1.0 / 3 + 1.0 / 2, 1e-12);
}

TEST(Ngd, TooShortCorpusThrows) {
  EXPECT_THROW(ngram_diversity(make_corpus({"a b"})), PreconditionError);
  NgdParams p;
  p.max_n = 2;
  EXPECT_NEAR(ngram_diversity(make_corpus({"a b"}), p), 2.0, 1e-12);
}

TEST(Ngd, BoundaryModes) {
  const Corpus c = make_corpus({"a b", "a b"});
  NgdParams p;
  p.max_n = 2;
  EXPECT_NEAR(ngram_diversity(c, p), 0.5 + 0.5, 1e-12);
  p.boundary = Boundary::Concatenated;
  // Stream a b a b: unigrams 2/4, bigrams {ab, ba} 2/3.
  EXPECT_NEAR(ngram_diversity(c, p), 0.5 + 2.0 / 3.0, 1e-12);
}

TEST(Ngd, LowercaseOption) {
  NgdParams p;
  p.max_n = 1;
  EXPECT_NEAR(ngram_diversity(make_corpus({"A a"}), p), 1.0, 1e-12);
  p.lowercase = true;
  EXPECT_NEAR(ngram_diversity(make_corpus({"A a"}), p), 0.5, 1e-12);
}

// ----------------------------------------------------------------- MATTR

TEST(Mattr, Examples) {
  EXPECT_DOUBLE_EQ(mattr(Tokens{"a", "b", "a", "b"}, 2), 1.0);
  EXPECT_DOUBLE_EQ(mattr(Tokens{"a", "a", "b"}, 2), 0.75);
  EXPECT_DOUBLE_EQ(mattr(Tokens{"p", "q", "r", "s", "t", "u"}, 3), 1.0);
}

TEST(Mattr, WindowAtLeastLengthIsTtr) {
  const Tokens t{"a", "b", "a", "c", "a"};
  EXPECT_DOUBLE_EQ(mattr(t, 5), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(mattr(t, 50), 3.0 / 5.0);
}

TEST(Mattr, MatchesOracleOnCorpus) {
  const Corpus c = make_corpus({"the cat sat on the mat and the cat ran", "a dog a dog a dog barked"});
  MattrParams p;
  p.window = 4;
  EXPECT_NEAR(mattr(c, p), oracle::mattr(token_streams(c), 4), 1e-12);
}

// ------------------------------------------------------------------- HD-D

TEST(Hdd, HandExample) {
  EXPECT_NEAR(hdd(Tokens{"a", "a", "b", "b", "c", "c"}, 2), 0.9, 1e-12);
}

TEST(Hdd, SingleType) {
  EXPECT_NEAR(hdd(Tokens(10, "x"), 4), 0.25, 1e-12);
}

TEST(Hdd, MatchesLogGammaOracle) {
  const Corpus c = make_corpus({"one fish two fish red fish blue fish this one has a little star "
                                "this one has a little car say what a lot of fish there are"});
  EXPECT_NEAR(hdd(c[0].tokens(), 10), oracle::hdd(c[0].tokens(), 10), 1e-10);
}

TEST(Hdd, SampleLargerThanStreamRejected) {
  EXPECT_THROW(hdd(Tokens{"a", "b"}, 3), PreconditionError);
}

// ------------------------------------------------------- self-repetition

TEST(SelfRepetition, NoSharedFourGramsIsZero) {
  const Corpus c = make_corpus({"a b c d e", "f g h i j", "a b c x d e"});
  EXPECT_EQ(self_repetition(c).score, 0.0);
}

TEST(SelfRepetition, HandExample) {
  const Corpus c = make_corpus({"w x y z", "w x y z", "p q r s"});
  EXPECT_NEAR(self_repetition(c).score, 2.0 * std::log(2.0) / 3.0, 1e-12);
}

TEST(SelfRepetition, MultiplicityCountsEveryPosition) {
  // "a b c d" twice in d1 and once in d2: d1 sum = 2, d2 sum = 1.
  const Corpus c = make_corpus({"a b c d a b c d", "a b c d", "z z z z"});
  SelfRepetitionParams p;
  p.per_document = true;
  const auto r = self_repetition(c, p);
  ASSERT_EQ(r.per_document.size(), 3u);
  EXPECT_NEAR(r.per_document[0], std::log(3.0), 1e-12);
  EXPECT_NEAR(r.per_document[1], std::log(2.0), 1e-12);
  EXPECT_NEAR(r.per_document[2], 0.0, 1e-12);
  EXPECT_NEAR(r.score, oracle::self_repetition(token_streams(c), 4), 1e-12);
}

// ---------------------------------------------------------- BLEU, ROUGE-L

TEST(Bleu, Examples) {
  EXPECT_NEAR(bleu(Tokens{"a", "b", "c", "d"}, Tokens{"a", "b", "c", "d"}), 1.0, 1e-12);
  EXPECT_NEAR(bleu(Tokens{"a", "b", "c", "d"}, Tokens{"a", "b", "c", "d", "e"}), std::exp(1.0 - 5.0 / 4.0), 1e-12);
  EXPECT_LE(bleu(Tokens{"a", "b", "c", "d"}, Tokens{"w", "x", "y", "z"}), 1e-3);
}

TEST(Bleu, ShortHypothesisUsesReducedOrder) {
  const Tokens hyp{"a", "b"}, ref{"a", "b", "c"};
  EXPECT_NEAR(bleu(hyp, ref), oracle::bleu(hyp, ref), 1e-12);
}

TEST(Bleu, ProfilesAgreeWithDirectComputation) {
  const Corpus c = make_corpus({"the cat sat on the mat", "the cat ran on the mat today", "dogs bark"});
  const auto ids = detail::intern_tokens(c, false);
  const detail::BleuProfiles profiles(ids, 4);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      EXPECT_NEAR(profiles.bleu(i, j, {}), oracle::bleu(c[i].tokens(), c[j].tokens()), 1e-12);
    }
  }
}

TEST(RougeL, Examples) {
  EXPECT_NEAR(rouge_l(Tokens{"a", "b", "c", "d"}, Tokens{"a", "c", "d"}), 6.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(rouge_l(Tokens{"x", "y"}, Tokens{"x", "y"}), 1.0);
  EXPECT_DOUBLE_EQ(rouge_l(Tokens{}, Tokens{"x"}), 0.0);
}

// -------------------------------------------------------- homogenization

TEST(Homogenization, IdenticalDocsBleuIsOne) {
  EXPECT_NEAR(self_bleu(make_corpus({"a b c d e", "a b c d e", "a b c d e"})), 1.0, 1e-9);
}

TEST(Homogenization, DisjointRougeIsZero) {
  EXPECT_EQ(homogenization(make_corpus({"a b", "c d", "e f"}), SimilarityKind::make_rouge_l()), 0.0);
}

TEST(Homogenization, MeanOfOrderedPairs) {
  const Corpus c = make_corpus({"a b c d", "a c d", "b d x"});
  const auto t = token_streams(c);
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) sum += oracle::rouge_l(t[i], t[j]);
    }
  }
  EXPECT_NEAR(homogenization(c, SimilarityKind::make_rouge_l()), sum / 6.0, 1e-12);
  HomogenizationOptions literal;
  literal.normalization = Normalization::Literal;
  EXPECT_NEAR(homogenization(c, SimilarityKind::make_rouge_l(), literal), sum / 2.0, 1e-12);
}

TEST(Homogenization, BleuAveragesBothDirections) {
  const Corpus c = make_corpus({"a b c d", "a b c d e"});
  const double expected = (oracle::bleu(c[0].tokens(), c[1].tokens()) + oracle::bleu(c[1].tokens(), c[0].tokens())) / 2;
  EXPECT_NEAR(self_bleu(c), expected, 1e-12);
}

TEST(Homogenization, NeedsTwoDocuments) {
  EXPECT_THROW(self_bleu(make_corpus({"a b c"})), PreconditionError);
}

TEST(Homogenization, EmbedCosineNeedsProvider) {
  EXPECT_THROW(homogenization(make_corpus({"a", "b"}), SimilarityKind::make_embed_cosine()), BackendError);
  StubEmbeddingProvider stub(16);
  HomogenizationOptions o;
  o.provider = &stub;
  EXPECT_NEAR(homogenization(make_corpus({"same", "same"}), SimilarityKind::make_embed_cosine(), o), 1.0, 1e-12);
}

// ------------------------------------------------------------- pairwise

TEST(PairwiseMap, EvaluatesEveryPairOnce) {
  std::vector<std::string> ids;
  for (int i = 0; i < 500; ++i) ids.push_back(std::to_string(i));
  SimilarityCache cache;
  std::atomic<std::size_t> calls{0};
  PairwiseOptions o;
  o.workers = 4;
  const auto stats = pairwise_map(ids, [&](std::size_t, std::size_t) { ++calls; return 0.5; }, cache, o);
  EXPECT_EQ(stats.pairs, 124750u);
  EXPECT_EQ(calls.load(), 124750u);
  EXPECT_EQ(cache.size(), 124750u);
  const auto again = pairwise_map(ids, [&](std::size_t, std::size_t) { ++calls; return 0.5; }, cache, o);
  EXPECT_EQ(again.misses, 0u);
  EXPECT_EQ(again.hits, 124750u);
}

TEST(PairwiseMap, WorkerCountDoesNotChangeResults) {
  std::vector<std::string> texts;
  for (int i = 0; i < 40; ++i) texts.push_back("doc " + std::to_string(i % 7) + " shares words " + std::to_string(i));
  const Corpus c = make_corpus(texts);
  SimilarityCache one, eight;
  PairwiseOptions o1, o8;
  o1.workers = 1;
  o8.workers = 8;
  pairwise_map(c, SimilarityKind::make_bleu(), one, o1);
  pairwise_map(c, SimilarityKind::make_bleu(), eight, o8);
  EXPECT_EQ(one.entries(), eight.entries());
}

TEST(PairwiseMap, CacheKeyIsSymmetric) {
  SimilarityCache cache;
  cache.insert("a", "b", 0.25);
  ASSERT_TRUE(cache.find("b", "a"));
  EXPECT_EQ(*cache.find("b", "a"), 0.25);
}

TEST(PairwiseMap, CacheBoundToOneSimilarity) {
  const Corpus c = make_corpus({"a b", "a c"});
  SimilarityCache cache;
  pairwise_map(c, SimilarityKind::make_bleu(), cache);
  EXPECT_THROW(pairwise_map(c, SimilarityKind::make_rouge_l(), cache), Error);
}

TEST(PairwiseMap, FailureKeepsFinishedPairs) {
  std::vector<std::string> ids{"0", "1", "2", "3"};
  SimilarityCache cache;
  PairwiseOptions o;
  o.workers = 1;
  EXPECT_THROW(pairwise_map(
                   ids,
                   [](std::size_t i, std::size_t j) -> double {
                     if (i == 1 && j == 3) throw BackendError("boom");
                     return 1.0;
                   },
                   cache, o),
               BackendError);
  EXPECT_TRUE(cache.find("0", "1"));
  const auto rerun = pairwise_map(ids, [](std::size_t, std::size_t) { return 1.0; }, cache, o);
  EXPECT_EQ(rerun.hits + rerun.misses, 6u);
  EXPECT_LT(rerun.misses, 6u);
}

TEST(PairwiseMap, StopTokenCancels) {
  std::stop_source source;
  source.request_stop();
  std::vector<std::string> ids{"0", "1", "2"};
  SimilarityCache cache;
  PairwiseOptions o;
  o.stop = source.get_token();
  EXPECT_THROW(pairwise_map(ids, [](std::size_t, std::size_t) { return 1.0; }, cache, o), CancelledError);
}

// ------------------------------------------------------------ embeddings

TEST(Embedding, StubDeterministicAndSized) {
  StubEmbeddingProvider stub(64);
  const std::vector<std::string> texts{"hello world", "hello world", "other"};
  const auto v = stub.embed(texts);
  EXPECT_EQ(v[0], v[1]);
  for (const auto& e : v) EXPECT_EQ(e.dimension(), 64u);
}

TEST(Embedding, RemoteCliqueAndChamferIdenticalDocsZero) {
  StubEmbeddingProvider stub(32);
  const Corpus c = make_corpus({"same text", "same text", "same text"});
  EXPECT_NEAR(remote_clique(c, stub), 0.0, 1e-12);
  EXPECT_NEAR(chamfer_dist(c, stub), 0.0, 1e-12);
}

TEST(Embedding, OrthogonalPairHasDistanceOne) {
  TableProvider p({{"x", {1.0, 0.0}}, {"y", {0.0, 1.0}}});
  const Corpus c = make_corpus({"x", "y"});
  EXPECT_NEAR(remote_clique(c, p), 1.0, 1e-12);
  EXPECT_NEAR(chamfer_dist(c, p), 1.0, 1e-12);
}

TEST(Embedding, ThreeDocsMatchBruteForce) {
  StubEmbeddingProvider stub(24, 5);
  const Corpus c = make_corpus({"the cat sat", "a dog ran fast", "the cat ran"});
  const auto v = embed(c, stub);
  double rc = 0.0, ch = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0, best = 1e300;
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t k = 0; k < 24; ++k) {
        dot += v[i].values[k] * v[j].values[k];
        ni += v[i].values[k] * v[i].values[k];
        nj += v[j].values[k] * v[j].values[k];
      }
      const double d = 1.0 - dot / std::sqrt(ni * nj);
      sum += d;
      best = std::min(best, d);
    }
    rc += sum / 2.0;
    ch += best;
  }
  EXPECT_NEAR(remote_clique(c, stub), rc / 3.0, 1e-12);
  EXPECT_NEAR(chamfer_dist(c, stub), ch / 3.0, 1e-12);
}

TEST(Embedding, MixedModelsRejected) {
  std::vector<EmbeddingVector> v{{{1.0, 0.0}, "m1"}, {{0.0, 1.0}, "m2"}};
  EXPECT_THROW(remote_clique(v), BackendError);
  std::vector<EmbeddingVector> w{{{1.0, 0.0}, "m"}, {{0.0, 1.0, 0.0}, "m"}};
  EXPECT_THROW(chamfer_dist(w), BackendError);
}
