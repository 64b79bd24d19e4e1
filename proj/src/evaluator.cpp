#include "trevl/evaluator.hpp"

#include "trevl/errors.hpp"
#include "trevl/ranking.hpp"

namespace trevl {

Evaluator::Evaluator(QrelSet qrel, MeasureSelection measures, EvaluatorOptions options)
    : qrel_(std::move(qrel)),
      measures_(std::move(measures)),
      options_(options),
      ids_(measures_.ids()) {
  if (measures_.empty()) throw UnknownMeasureError("no measures selected");
  info_.reserve(qrel_.size());
  for (const auto& [qid, judgments] : qrel_) {
    info_.emplace(qid, QueryInfo{&judgments, count_relevant(judgments),
                                 ideal_gains(judgments)});
  }
}

std::optional<int> Evaluator::num_relevant(const std::string& query_id) const {
  auto it = info_.find(query_id);
  if (it == info_.end()) return std::nullopt;
  return it->second.num_rel;
}

ResultSet Evaluator::evaluate(const RunSet& run) const {
  ResultSet results;
  results.measure_ids = ids_;
  results.qrel_query_count = qrel_.size();

  for (const auto& [qid, scored] : run) {
    auto found = info_.find(qid);
    if (found == info_.end()) continue;
    const QueryInfo& info = found->second;

    OrderedRanking ranking = rank_documents(scored);
    if (options_.depth_cap) ranking.truncate(*options_.depth_cap);
    const std::vector<int> rels = relevance_by_rank(ranking, *info.judgments);

    auto& values = results.per_query[qid];
    for (const auto& request : measures_.requests()) {
      switch (request.measure) {
        case Measure::kMap:
          values["map"] = kernels::average_precision(rels, info.num_rel);
          break;
        case Measure::kNdcg:
          values["ndcg"] = kernels::ndcg(rels, info.ideal, std::nullopt);
          break;
        case Measure::kNdcgCut:
          for (std::size_t k : request.cutoffs) {
            values["ndcg_cut_" + std::to_string(k)] = kernels::ndcg(rels, info.ideal, k);
          }
          break;
        case Measure::kPrecision:
          for (std::size_t k : request.cutoffs) {
            values["P_" + std::to_string(k)] = kernels::precision_at(rels, k);
          }
          break;
        case Measure::kRecipRank:
          values["recip_rank"] = kernels::reciprocal_rank(rels);
          break;
        case Measure::kNumRel:
          values["num_rel"] = info.num_rel;
          break;
        case Measure::kNumRet:
          values["num_ret"] = static_cast<double>(rels.size());
          break;
        case Measure::kNumRelRet:
          values["num_rel_ret"] = kernels::relevant_retrieved(rels);
          break;
      }
    }
  }
  return results;
}

std::vector<std::pair<std::string, double>> aggregate(const ResultSet& results,
                                                      AggregateMode mode) {
  const std::size_t denominator = mode == AggregateMode::kComplete
                                      ? results.qrel_query_count
                                      : results.evaluated_query_count();
  if (denominator == 0) {
    throw EmptyAggregateError("no queries to aggregate");
  }

  std::vector<std::pair<std::string, double>> out;
  out.reserve(results.measure_ids.size());
  for (const auto& id : results.measure_ids) {
    double sum = 0.0;
    for (const auto& [qid, values] : results.per_query) {
      auto it = values.find(id);
      if (it != values.end()) sum += it->second;
    }
    out.emplace_back(id, is_count_measure(id) ? sum : sum / static_cast<double>(denominator));
  }
  return out;
}

}  // namespace trevl
