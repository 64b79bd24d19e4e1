#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trevl/query_set.hpp"

namespace trevl {

struct RankedDocument {
  std::string doc_id;
  double score = 0.0;
  int rank = 0;  // 1-based

  friend bool operator==(const RankedDocument&, const RankedDocument&) = default;
};

/// Documents in evaluation order: score descending, ties by doc id descending
/// (byte-wise). Only rank_documents() builds one, so the order always holds.
class OrderedRanking {
 public:
  OrderedRanking() = default;

  const std::vector<RankedDocument>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const RankedDocument& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Keeps the first `depth` entries.
  void truncate(std::size_t depth) {
    if (entries_.size() > depth) entries_.resize(depth);
  }

 private:
  friend OrderedRanking rank_documents(
      std::span<const std::pair<std::string, double>> scored);

  std::vector<RankedDocument> entries_;
};

/// Sorts by (score desc, doc id desc). The input order is irrelevant.
/// Throws InputError on a non-finite score.
OrderedRanking rank_documents(std::span<const std::pair<std::string, double>> scored);

inline OrderedRanking rank_documents(const ScoredDocs& scored) {
  return rank_documents(std::span(scored.entries()));
}

/// Relevance level at each rank; unjudged documents map to 0.
std::vector<int> relevance_by_rank(const OrderedRanking& ranking,
                                   const Judgments& judgments);

/// Number of judged documents with relevance > 0.
int count_relevant(const Judgments& judgments);

/// Positive relevance levels of `judgments`, sorted descending.
std::vector<int> ideal_gains(const Judgments& judgments);

// Kernels over a relevance-by-rank vector. These are what the Evaluator runs.
namespace kernels {

double average_precision(std::span<const int> rels, int num_rel);

double dcg(std::span<const int> gains, std::size_t depth);

/// `ideal` must hold positive gains sorted descending.
double ndcg(std::span<const int> rels, std::span<const int> ideal,
            std::optional<std::size_t> cutoff);

double precision_at(std::span<const int> rels, std::size_t k);

double reciprocal_rank(std::span<const int> rels);

int relevant_retrieved(std::span<const int> rels);

}  // namespace kernels

/// Sum of precision at each retrieved relevant document's rank, over
/// `num_rel`. Relevant documents that were not retrieved contribute 0.
double average_precision(const OrderedRanking& ranking, const Judgments& judgments,
                         int num_rel);

/// Linear-gain NDCG with 1/log2(rank + 1) discount. The ideal ranking is built
/// from every judged relevant document, retrieved or not, truncated at the
/// same cutoff. 0 when nothing is judged relevant.
double ndcg(const OrderedRanking& ranking, const Judgments& judgments,
            std::optional<std::size_t> cutoff = std::nullopt);

/// Relevant documents in the top k over k, even when fewer than k are ranked.
double precision_at_k(const OrderedRanking& ranking, const Judgments& judgments,
                      std::size_t k);

}  // namespace trevl
