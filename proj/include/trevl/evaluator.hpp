#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trevl/measures.hpp"
#include "trevl/query_set.hpp"

namespace trevl {

/// Per-query measure values. Queries are kept in byte-wise id order.
struct ResultSet {
  std::vector<std::string> measure_ids;  // selection order
  std::map<std::string, std::map<std::string, double>> per_query;
  std::size_t qrel_query_count = 0;

  std::size_t evaluated_query_count() const { return per_query.size(); }
};

enum class AggregateMode {
  kJudgedOnly,  // mean over evaluated queries
  kComplete,    // mean over every qrel query; missing queries count as 0
};

/// The "all" row, in `results.measure_ids` order. Rate measures are
/// averaged; num_rel, num_ret and num_rel_ret are summed as trec_eval does.
/// Throws EmptyAggregateError when judged-only mode has nothing to average.
std::vector<std::pair<std::string, double>> aggregate(const ResultSet& results,
                                                      AggregateMode mode);

struct EvaluatorOptions {
  /// Keep only the top `depth_cap` ranked documents per query (trec_eval -M).
  std::optional<std::size_t> depth_cap;
};

/// Frozen relevance judgments plus a measure selection. evaluate() is const
/// and touches no shared mutable state, so one Evaluator can serve many
/// threads at once.
class Evaluator {
 public:
  /// Throws UnknownMeasureError if `measures` is empty.
  Evaluator(QrelSet qrel, MeasureSelection measures, EvaluatorOptions options = {});

  // info_ points into qrel_; moves keep those addresses, copies would not.
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;
  Evaluator(Evaluator&&) = default;
  Evaluator& operator=(Evaluator&&) = default;

  /// Evaluates each query present in both the run and the qrel. Documents
  /// missing from the qrel count as non-relevant, and so do negative
  /// judgments. Throws InputError on a non-finite score.
  ResultSet evaluate(const RunSet& run) const;

  const MeasureSelection& measures() const { return measures_; }
  std::size_t qrel_query_count() const { return qrel_.size(); }
  /// Number of documents judged relevant (> 0) for `query_id`, or nullopt.
  std::optional<int> num_relevant(const std::string& query_id) const;

 private:
  struct QueryInfo {
    const Judgments* judgments;
    int num_rel;
    std::vector<int> ideal;
  };

  QrelSet qrel_;
  MeasureSelection measures_;
  EvaluatorOptions options_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, QueryInfo> info_;
};

}  // namespace trevl
