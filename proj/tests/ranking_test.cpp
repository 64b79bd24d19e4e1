#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "support/oracle.hpp"
#include "trevl/errors.hpp"
#include "trevl/measures.hpp"
#include "trevl/ranking.hpp"

namespace trevl {
namespace {

using Pairs = std::vector<std::pair<std::string, double>>;

std::vector<std::string> ids(const OrderedRanking& ranking) {
  std::vector<std::string> out;
  for (const auto& e : ranking) out.push_back(e.doc_id);
  return out;
}

Judgments judgments(std::initializer_list<std::pair<std::string, int>> rels) {
  Judgments j;
  for (const auto& [doc, rel] : rels) j.insert(doc, rel);
  return j;
}

TEST(RankDocuments, ScoreDescending) {
  const Pairs scored = {{"d1", 0.5}, {"d2", 2.0}};
  EXPECT_EQ(ids(rank_documents(scored)), (std::vector<std::string>{"d2", "d1"}));
}

TEST(RankDocuments, TiesByDocIdDescending) {
  const Pairs scored = {{"a", 1.0}, {"c", 1.0}, {"b", 1.0}, {"z", 0.0}};
  EXPECT_EQ(ids(rank_documents(scored)), (std::vector<std::string>{"c", "b", "a", "z"}));
}

TEST(RankDocuments, TieBreakIsBytewise) {
  // 'D' (0x44) sorts below 'd' (0x64); "d10" > "d1" > "d09".
  const Pairs scored = {{"d1", 1.0}, {"D9", 1.0}, {"d10", 1.0}, {"d09", 1.0}};
  EXPECT_EQ(ids(rank_documents(scored)),
            (std::vector<std::string>{"d10", "d1", "d09", "D9"}));
}

TEST(RankDocuments, RanksAreOneBased) {
  const Pairs scored = {{"x", 3.0}, {"y", 4.0}};
  const auto ranking = rank_documents(scored);
  EXPECT_EQ(ranking[0].rank, 1);
  EXPECT_EQ(ranking[1].rank, 2);
  EXPECT_EQ(ranking[0].score, 4.0);
}

TEST(RankDocuments, InputOrderIrrelevant) {
  Pairs scored = {{"a", 0.1}, {"b", -2.0}, {"c", 0.1}, {"d", 7.0}, {"e", 0.0}};
  const auto expected = ids(rank_documents(scored));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(scored.begin(), scored.end(), rng);
    EXPECT_EQ(ids(rank_documents(scored)), expected);
  }
}

TEST(RankDocuments, EmptyInput) { EXPECT_TRUE(rank_documents(Pairs{}).empty()); }

TEST(RankDocuments, RejectsNonFinite) {
  EXPECT_THROW(rank_documents(Pairs{{"a", std::numeric_limits<double>::quiet_NaN()}}),
               InputError);
  EXPECT_THROW(rank_documents(Pairs{{"a", std::numeric_limits<double>::infinity()}}),
               InputError);
}

TEST(RankDocuments, Truncate) {
  auto ranking = rank_documents(Pairs{{"a", 1}, {"b", 2}, {"c", 3}});
  ranking.truncate(5);
  EXPECT_EQ(ranking.size(), 3u);
  ranking.truncate(1);
  EXPECT_EQ(ids(ranking), std::vector<std::string>{"c"});
}

TEST(AveragePrecision, TwoQueryExample) {
  const auto q1 = rank_documents(Pairs{{"d1", 0.5}, {"d2", 2.0}});
  EXPECT_DOUBLE_EQ(average_precision(q1, judgments({{"d1", 1}, {"d2", 0}}), 1), 0.5);
  const auto q2 = rank_documents(Pairs{{"d1", 0.5}, {"d2", 0.6}});
  EXPECT_DOUBLE_EQ(average_precision(q2, judgments({{"d2", 1}}), 1), 1.0);
}

TEST(AveragePrecision, UnretrievedRelevantCountsInDenominator) {
  const auto r = rank_documents(Pairs{{"a", 2.0}, {"b", 1.0}});
  EXPECT_DOUBLE_EQ(average_precision(r, judgments({{"a", 1}, {"z", 1}}), 2), 0.5);
}

TEST(AveragePrecision, NoRelevantIsZero) {
  const auto r = rank_documents(Pairs{{"a", 2.0}});
  EXPECT_EQ(average_precision(r, judgments({{"a", 0}}), 0), 0.0);
}

TEST(Ndcg, TwoQueryExampleGolden) {
  const auto r = rank_documents(Pairs{{"d1", 0.5}, {"d2", 2.0}});
  EXPECT_NEAR(ndcg(r, judgments({{"d1", 1}, {"d2", 0}})), 0.6309297535714575, 1e-12);
}

TEST(Ndcg, GradedSwapMatchesOracle) {
  const Judgments j = judgments({{"a", 2}, {"b", 1}});
  const auto r = rank_documents(Pairs{{"b", 2.0}, {"a", 1.0}});
  // Independent: DCG of [1, 2] over max DCG across both orderings.
  const double want = oracle::ndcg({{"b", 2.0}, {"a", 1.0}}, {{"a", 2}, {"b", 1}});
  const double closed_form = (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0));
  EXPECT_NEAR(want, closed_form, 1e-15);
  EXPECT_NEAR(want, 0.8597187, 1e-7);
  EXPECT_NEAR(ndcg(r, j), want, 1e-12);
}

TEST(Ndcg, PerfectRankingIsOne) {
  const auto r = rank_documents(Pairs{{"a", 3.0}, {"b", 2.0}, {"c", 1.0}});
  EXPECT_DOUBLE_EQ(ndcg(r, judgments({{"a", 3}, {"b", 2}, {"c", 1}})), 1.0);
}

TEST(Ndcg, NoRelevantIsZero) {
  const auto r = rank_documents(Pairs{{"a", 3.0}});
  EXPECT_EQ(ndcg(r, judgments({{"a", 0}})), 0.0);
  EXPECT_EQ(ndcg(r, Judgments{}), 0.0);
}

TEST(Ndcg, NegativeRelevanceHasNoGain) {
  // Matches trec_eval: relevance <= 0 contributes nothing.
  const auto r = rank_documents(Pairs{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}});
  EXPECT_NEAR(ndcg(r, judgments({{"a", 2}, {"b", 1}, {"c", -1}})), 0.6199062332840657,
              1e-12);
}

TEST(Ndcg, IdealUsesUnretrievedRelevant) {
  const auto r = rank_documents(Pairs{{"a", 1.0}});
  // DCG = 1; IDCG = 2 + 1/log2(3).
  EXPECT_NEAR(ndcg(r, judgments({{"a", 1}, {"z", 2}})), 1.0 / (2.0 + 1.0 / std::log2(3.0)),
              1e-12);
}

TEST(Ndcg, CutoffTruncatesBothSides) {
  const auto r = rank_documents(Pairs{{"a", 2.0}, {"b", 1.0}});
  const Judgments j = judgments({{"a", 0}, {"b", 1}, {"c", 1}});
  EXPECT_EQ(ndcg(r, j, 1), 0.0);
  EXPECT_NEAR(ndcg(r, j, 2), (1.0 / std::log2(3.0)) / (1.0 + 1.0 / std::log2(3.0)), 1e-12);
}

TEST(PrecisionAtK, TwoQueryExampleGolden) {
  const auto q1 = rank_documents(Pairs{{"d1", 0.5}, {"d2", 2.0}});
  EXPECT_DOUBLE_EQ(precision_at_k(q1, judgments({{"d1", 1}, {"d2", 0}}), 5), 0.2);
  const auto q2 = rank_documents(Pairs{{"d1", 0.5}, {"d2", 0.6}});
  EXPECT_DOUBLE_EQ(precision_at_k(q2, judgments({{"d2", 1}}), 1), 1.0);
}

TEST(Kernels, ReciprocalRankAndCounts) {
  const std::vector<int> rels = {0, -1, 2, 0, 1};
  EXPECT_DOUBLE_EQ(kernels::reciprocal_rank(rels), 1.0 / 3.0);
  EXPECT_EQ(kernels::relevant_retrieved(rels), 2);
  EXPECT_EQ(kernels::reciprocal_rank(std::vector<int>{0, 0}), 0.0);
}

TEST(Kernels, IdealGainsSortedPositive) {
  EXPECT_EQ(ideal_gains(judgments({{"a", 1}, {"b", 0}, {"c", 3}, {"d", -2}, {"e", 1}})),
            (std::vector<int>{3, 1, 1}));
  EXPECT_EQ(count_relevant(judgments({{"a", 1}, {"b", 0}, {"c", 3}})), 2);
}

TEST(Properties, AgreeWithOracleOnRandomQueries) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    for (const auto& q : testing_support::random_instance(rng)) {
      Pairs scored;
      for (const auto& d : q.docs) scored.emplace_back(d.id, d.score);
      Judgments j;
      for (const auto& [doc, rel] : q.qrel) j.insert(doc, rel);
      const auto r = rank_documents(scored);
      EXPECT_NEAR(average_precision(r, j, count_relevant(j)),
                  oracle::average_precision(q.docs, q.qrel), 1e-12);
      EXPECT_NEAR(ndcg(r, j), oracle::ndcg(q.docs, q.qrel), 1e-12);
      for (std::size_t k : {1, 3, 10}) {
        EXPECT_NEAR(ndcg(r, j, k), oracle::ndcg(q.docs, q.qrel, k), 1e-12);
        EXPECT_NEAR(precision_at_k(r, j, k), oracle::precision(q.docs, q.qrel, k), 1e-12);
      }
    }
  }
}

TEST(Properties, AffineScoreTransformIsInvariant) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    for (const auto& q : testing_support::random_instance(rng)) {
      Pairs scored, shifted;
      for (const auto& d : q.docs) {
        scored.emplace_back(d.id, d.score);
        shifted.emplace_back(d.id, 4.0 * d.score + 8.0);
      }
      EXPECT_EQ(ids(rank_documents(scored)), ids(rank_documents(shifted)));
    }
  }
}

TEST(Properties, SwappingIntoPlaceNeverHurts) {
  // Moving a more relevant document above a less relevant neighbour cannot
  // lower ndcg or ap.
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> level(0, 3);
  for (int t = 0; t < 500; ++t) {
    std::vector<int> rels(8);
    for (int& r : rels) r = level(rng);
    std::vector<int> ideal;
    for (int r : rels)
      if (r > 0) ideal.push_back(r);
    std::sort(ideal.rbegin(), ideal.rend());
    const int num_rel = static_cast<int>(ideal.size());
    for (std::size_t i = 0; i + 1 < rels.size(); ++i) {
      if (rels[i] >= rels[i + 1]) continue;
      auto swapped = rels;
      std::swap(swapped[i], swapped[i + 1]);
      EXPECT_GE(kernels::ndcg(swapped, ideal, std::nullopt) + 1e-12,
                kernels::ndcg(rels, ideal, std::nullopt));
      if (rels[i] <= 0) {
        EXPECT_GE(kernels::average_precision(swapped, num_rel) + 1e-12,
                  kernels::average_precision(rels, num_rel));
      }
    }
  }
}

TEST(Properties, ValuesInUnitInterval) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 300; ++i) {
    for (const auto& q : testing_support::random_instance(rng)) {
      Pairs scored;
      for (const auto& d : q.docs) scored.emplace_back(d.id, d.score);
      Judgments j;
      for (const auto& [doc, rel] : q.qrel) j.insert(doc, rel);
      const auto r = rank_documents(scored);
      for (double v : {average_precision(r, j, count_relevant(j)), ndcg(r, j), ndcg(r, j, 2),
                       precision_at_k(r, j, 5)}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
      }
    }
  }
}

TEST(MeasureSelection, ParsesNamesAndCutoffs) {
  const auto sel = MeasureSelection::parse({"map", "P.5,10", "ndcg_cut.3"});
  EXPECT_EQ(sel.ids(), (std::vector<std::string>{"map", "P_5", "P_10", "ndcg_cut_3"}));
  EXPECT_EQ(sel.tokens(), (std::vector<std::string>{"map", "P.5,10", "ndcg_cut.3"}));
}

TEST(MeasureSelection, DefaultCutoffs) {
  const auto sel = MeasureSelection::parse({"P"});
  ASSERT_EQ(sel.requests().size(), 1u);
  EXPECT_EQ(sel.requests()[0].cutoffs, default_cutoffs());
  EXPECT_EQ(default_cutoffs(),
            (std::vector<std::size_t>{5, 10, 15, 20, 30, 100, 200, 500, 1000}));
}

TEST(MeasureSelection, MergesRepeatedMeasures) {
  const auto sel = MeasureSelection::parse({"P.10", "map", "P.5,10"});
  EXPECT_EQ(sel.ids(), (std::vector<std::string>{"P_5", "P_10", "map"}));
}

TEST(MeasureSelection, AllCoversSupportedSet) {
  std::set<std::string> names;
  const MeasureSelection all = MeasureSelection::all();
  for (const auto& r : all.requests()) {
    names.insert(std::string(measure_name(r.measure)));
  }
  EXPECT_EQ(names, supported_measures());
  EXPECT_TRUE(supported_measures().contains("map"));
  EXPECT_TRUE(supported_measures().contains("ndcg"));
  EXPECT_EQ(MeasureSelection::parse({"all_trec"}).ids(), MeasureSelection::all().ids());
}

TEST(MeasureSelection, RejectsBadTokens) {
  EXPECT_THROW(MeasureSelection::parse({"bogus"}), UnknownMeasureError);
  EXPECT_THROW(MeasureSelection::parse({"map.5"}), UnknownMeasureError);
  EXPECT_THROW(MeasureSelection::parse({"P."}), UnknownMeasureError);
  EXPECT_THROW(MeasureSelection::parse({"P.5,,10"}), UnknownMeasureError);
  EXPECT_THROW(MeasureSelection::parse({"P.0"}), UnknownMeasureError);
  EXPECT_THROW(MeasureSelection::parse({"P.x"}), UnknownMeasureError);
}

TEST(MeasureSelection, CountMeasures) {
  EXPECT_TRUE(is_count_measure("num_rel"));
  EXPECT_TRUE(is_count_measure("num_ret"));
  EXPECT_TRUE(is_count_measure("num_rel_ret"));
  EXPECT_FALSE(is_count_measure("map"));
  EXPECT_FALSE(is_count_measure("P_5"));
}

}  // namespace
}  // namespace trevl
