#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "trevl/errors.hpp"
#include "trevl/synth.hpp"

namespace trevl::synth {
namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.vocab_size = 50;
  c.collection_size = 20;
  c.mean_doc_length = 30;
  c.query_count = 100;
  c.seed = 7;
  return c;
}

// Three documents over a four-term vocabulary; term 3 never occurs.
SyntheticCollection tiny_collection() {
  SyntheticCollection c;
  c.vocab_size = 4;
  c.documents = {{0, 0, 0, 0}, {0, 1}, {2, 2}};
  return c;
}

// Direct evaluation of the query-likelihood formula.
double direct_score(const Index& index, const std::vector<TokenId>& query, std::size_t doc,
                    double mu) {
  double s = 0.0;
  for (TokenId w : query) {
    const double p = index.collection_probability(w);
    const double bg = p > 0.0 ? mu * p : kSmoothingFloor;
    s += std::log((index.tf(w, doc) + bg) / (static_cast<double>(index.doc_length(doc)) + mu));
  }
  return s;
}

TEST(Poisson, TruncatedRateHitsMean) {
  for (double mean : {1.0, 1.5, 3.0, 10.0, 200.0}) {
    const double rate = zero_truncated_poisson_rate(mean);
    const double truncated = rate == 0.0 ? 1.0 : rate / (1.0 - std::exp(-rate));
    EXPECT_NEAR(truncated, mean, 1e-9) << mean;
  }
}

TEST(Poisson, PositiveDraws) {
  std::mt19937_64 rng(1);
  double sum = 0.0;
  const int n = 20000;
  const double rate = zero_truncated_poisson_rate(3.0);
  for (int i = 0; i < n; ++i) {
    const std::size_t x = sample_positive_poisson(rate, rng);
    ASSERT_GE(x, 1u);
    sum += static_cast<double>(x);
  }
  EXPECT_NEAR(sum / n, 3.0, 0.05);
  EXPECT_EQ(sample_positive_poisson(0.0, rng), 1u);
}

TEST(Collection, DeterministicInSeed) {
  const auto a = sample_collection(small_config());
  const auto b = sample_collection(small_config());
  EXPECT_EQ(a.documents, b.documents);
  SynthConfig other = small_config();
  other.seed = 8;
  EXPECT_NE(sample_collection(other).documents, a.documents);
}

TEST(Collection, ShapeAndLengths) {
  const auto c = sample_collection(small_config());
  EXPECT_EQ(c.vocab_size, 50u);
  ASSERT_EQ(c.documents.size(), 20u);
  for (std::size_t d = 0; d < c.documents.size(); ++d) {
    EXPECT_EQ(c.documents[d].size(), c.target_lengths[d]);
    EXPECT_GE(c.documents[d].size(), 1u);
    for (TokenId t : c.documents[d]) EXPECT_LT(t, 50u);
  }
  const auto total = std::accumulate(c.unigram_counts.begin(), c.unigram_counts.end(),
                                     std::uint64_t{0});
  std::size_t tokens = 0;
  for (const auto& d : c.documents) tokens += d.size();
  EXPECT_EQ(total, tokens);
}

TEST(Collection, UnigramOnlyHasNoBigramDraws) {
  SynthConfig c = small_config();
  c.ngram_size_distribution = {1.0, 0.0};
  const auto col = sample_collection(c);
  EXPECT_EQ(col.bigram_draws, 0u);
  EXPECT_GT(col.unigram_draws, 0u);
  c.ngram_size_distribution = {1.0};
  EXPECT_EQ(sample_collection(c).bigram_draws, 0u);
}

TEST(Collection, BigramsDrawnWhenEnabled) {
  SynthConfig c = small_config();
  c.ngram_size_distribution = {0.5, 0.5};
  EXPECT_GT(sample_collection(c).bigram_draws, 0u);
}

TEST(PseudoCounts, PositiveAndBudgeted) {
  SynthConfig c = small_config();
  std::mt19937_64 rng(2);
  const auto pc = PseudoCounts::sample(c, rng);
  for (double a : pc.unigram()) EXPECT_GT(a, 0.0);
  EXPECT_TRUE(pc.has_bigrams());
  EXPECT_GT(pc.bigram(3, 4), 0.0);
  c.bigram_memory_budget = 100;
  EXPECT_THROW(PseudoCounts::sample(c, rng), ConfigError);
  c.ngram_size_distribution = {1.0, 0.0};
  EXPECT_NO_THROW(PseudoCounts::sample(c, rng));
}

TEST(Queries, TermsComeFromRelevantDocuments) {
  const SynthConfig cfg = small_config();
  const auto col = sample_collection(cfg);
  const auto qs = sample_queries(col, cfg);
  ASSERT_EQ(qs.queries.size(), cfg.query_count);
  ASSERT_EQ(qs.ids.size(), cfg.query_count);
  EXPECT_EQ(qs.qrel.size(), cfg.query_count);
  for (std::size_t q = 0; q < qs.queries.size(); ++q) {
    ASSERT_EQ(qs.relevant[q].size(), cfg.relevant_per_query);
    EXPECT_TRUE(std::is_sorted(qs.relevant[q].begin(), qs.relevant[q].end()));
    EXPECT_GE(qs.queries[q].size(), 1u);
    for (TokenId t : qs.queries[q]) {
      const bool found = std::any_of(qs.relevant[q].begin(), qs.relevant[q].end(),
                                     [&](std::size_t d) {
                                       const auto& doc = col.documents[d];
                                       return std::find(doc.begin(), doc.end(), t) != doc.end();
                                     });
      EXPECT_TRUE(found) << "query " << q << " term " << t;
    }
    EXPECT_EQ(qs.qrel.find(qs.ids[q])->size(), cfg.relevant_per_query);
  }
}

TEST(Queries, Deterministic) {
  const SynthConfig cfg = small_config();
  const auto col = sample_collection(cfg);
  EXPECT_EQ(sample_queries(col, cfg).queries, sample_queries(col, cfg).queries);
}

TEST(Queries, SingleTermCollectionCannotYieldQueries) {
  SynthConfig cfg = small_config();
  cfg.relevant_per_query = 1;
  SyntheticCollection col;
  col.vocab_size = 2;
  col.documents = {{0, 0}, {0}};
  EXPECT_THROW(sample_queries(col, cfg), InputError);
}

TEST(Ids, PaddedForBytewiseOrder) {
  EXPECT_EQ(document_id(7, 100), "d07");
  EXPECT_EQ(document_id(0, 10), "d0");
  EXPECT_EQ(query_id(42, 2000), "q0042");
  EXPECT_LT(document_id(9, 100), document_id(10, 100));
}

TEST(IndexTest, CountsAndProbabilities) {
  const Index index(tiny_collection());
  EXPECT_EQ(index.document_count(), 3u);
  EXPECT_EQ(index.total_tokens(), 8u);
  EXPECT_EQ(index.tf(0, 0), 4u);
  EXPECT_EQ(index.tf(0, 2), 0u);
  EXPECT_EQ(index.doc_length(1), 2u);
  EXPECT_DOUBLE_EQ(index.collection_probability(0), 5.0 / 8.0);
  EXPECT_EQ(index.collection_probability(3), 0.0);
  EXPECT_EQ(index.collection_probability(99), 0.0);
  EXPECT_EQ(index.postings(2).size(), 1u);
  EXPECT_TRUE(index.postings(3).empty());
}

TEST(IndexTest, EmptyCollectionRejected) {
  SyntheticCollection c;
  c.vocab_size = 3;
  EXPECT_THROW(Index{c}, InputError);
}

TEST(Retrieve, MatchesDirectFormula) {
  const SynthConfig cfg = small_config();
  const auto col = sample_collection(cfg);
  const Index index(col);
  const auto qs = sample_queries(col, cfg);
  for (std::size_t q = 0; q < 20; ++q) {
    const auto ranking = retrieve(index, qs.queries[q], 2500.0, index.document_count());
    ASSERT_EQ(ranking.size(), index.document_count());
    for (const auto& e : ranking) {
      const std::size_t d = std::stoul(e.doc_id.substr(1));
      EXPECT_NEAR(e.score, direct_score(index, qs.queries[q], d, 2500.0), 1e-9);
    }
  }
}

TEST(Retrieve, SmoothedModelIsADistribution) {
  const Index index(tiny_collection());
  for (double mu : {0.5, 10.0, 2500.0}) {
    for (std::size_t d = 0; d < 3; ++d) {
      double sum = 0.0;
      for (TokenId w = 0; w < 4; ++w) {
        sum += (index.tf(w, d) + mu * index.collection_probability(w)) /
               (static_cast<double>(index.doc_length(d)) + mu);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Retrieve, HugeMuFlattensScores) {
  const Index index(tiny_collection());
  const auto ranking = retrieve(index, std::vector<TokenId>{0, 1}, 1e9, 3);
  const auto [lo, hi] = std::minmax_element(
      ranking.begin(), ranking.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  EXPECT_LT(hi->score - lo->score, 1e-7);
}

TEST(Retrieve, HigherTfScoresHigherAtEqualLength) {
  SyntheticCollection c;
  c.vocab_size = 3;
  c.documents = {{0, 1, 1, 1}, {0, 0, 1, 1}, {0, 0, 0, 1}};
  const Index index(c);
  const auto ranking = retrieve(index, std::vector<TokenId>{0}, 10.0, 3);
  EXPECT_EQ(ranking[0].doc_id, "d2");
  EXPECT_EQ(ranking[1].doc_id, "d1");
  EXPECT_EQ(ranking[2].doc_id, "d0");
}

TEST(Retrieve, UnseenTermUsesFloor) {
  const Index index(tiny_collection());
  const auto ranking = retrieve(index, std::vector<TokenId>{3}, 1.0, 3);
  for (const auto& e : ranking) {
    EXPECT_TRUE(std::isfinite(e.score));
    const std::size_t d = std::stoul(e.doc_id.substr(1));
    EXPECT_NEAR(e.score,
                std::log(kSmoothingFloor / (static_cast<double>(index.doc_length(d)) + 1.0)),
                1e-12);
  }
}

TEST(Retrieve, TopKAndArguments) {
  const Index index(tiny_collection());
  EXPECT_EQ(retrieve(index, std::vector<TokenId>{0}, 1.0, 2).size(), 2u);
  EXPECT_EQ(retrieve(index, std::vector<TokenId>{0}, 1.0, 50).size(), 3u);
  EXPECT_THROW(retrieve(index, std::vector<TokenId>{0}, 0.0, 2), std::invalid_argument);
  EXPECT_THROW(retrieve(index, std::vector<TokenId>{0}, 1.0, 0), std::invalid_argument);
}

TEST(Config, ParseRoundTrip) {
  SynthConfig c = small_config();
  c.ngram_size_distribution = {0.75, 0.25};
  std::stringstream buf;
  write_config(c, buf);
  const SynthConfig back = parse_config(buf);
  EXPECT_EQ(back.vocab_size, c.vocab_size);
  EXPECT_EQ(back.collection_size, c.collection_size);
  EXPECT_EQ(back.mean_doc_length, c.mean_doc_length);
  EXPECT_EQ(back.ngram_size_distribution, c.ngram_size_distribution);
  EXPECT_EQ(back.seed, c.seed);
}

TEST(Config, CommentsAndErrors) {
  std::istringstream ok("# comment\nvocab_size = 12  # trailing\n\nseed=3\n");
  const SynthConfig c = parse_config(ok);
  EXPECT_EQ(c.vocab_size, 12u);
  EXPECT_EQ(c.seed, 3u);

  std::istringstream unknown("vocab = 3\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
  std::istringstream bad("vocab_size = many\n");
  EXPECT_THROW(parse_config(bad), ConfigError);
  std::istringstream sum("ngram_size_distribution = 0.5,0.4\n");
  EXPECT_THROW(parse_config(sum), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/synth.conf"), ConfigError);
}

TEST(Config, Validation) {
  SynthConfig c;
  EXPECT_NO_THROW(c.validate());
  c.mean_query_length = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SynthConfig{};
  c.ngram_size_distribution = {0.5, 0.25, 0.25};
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(SynthConfig::large_scale().vocab_size, 10000u);
  EXPECT_EQ(SynthConfig::large_scale().query_count, 100000u);
}

TEST(TokenLines, RoundTripAndErrors) {
  const std::vector<std::vector<TokenId>> lines = {{1, 2, 3}, {0}, {4, 4}};
  std::stringstream buf;
  write_token_lines(lines, buf);
  EXPECT_EQ(read_token_lines(buf, 5), lines);
  std::istringstream out_of_vocab("1 2\n7\n");
  EXPECT_THROW(read_token_lines(out_of_vocab, 5), ParseError);
  std::istringstream junk("1 x\n");
  EXPECT_THROW(read_token_lines(junk, 5), ParseError);
}

}  // namespace
}  // namespace trevl::synth
