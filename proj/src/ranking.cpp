#include "trevl/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "trevl/errors.hpp"

namespace trevl {

OrderedRanking rank_documents(std::span<const std::pair<std::string, double>> scored) {
  for (const auto& [doc, score] : scored) {
    if (!std::isfinite(score)) {
      throw InputError("non-finite score for document '" + doc + "'");
    }
  }

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& lhs = scored[a];
    const auto& rhs = scored[b];
    if (lhs.second != rhs.second) return lhs.second > rhs.second;
    return lhs.first > rhs.first;
  });

  OrderedRanking ranking;
  ranking.entries_.reserve(order.size());
  int rank = 1;
  for (std::size_t i : order) {
    ranking.entries_.push_back({scored[i].first, scored[i].second, rank++});
  }
  return ranking;
}

std::vector<int> relevance_by_rank(const OrderedRanking& ranking,
                                   const Judgments& judgments) {
  std::vector<int> rels;
  rels.reserve(ranking.size());
  for (const auto& entry : ranking) {
    const int* rel = judgments.find(entry.doc_id);
    rels.push_back(rel == nullptr ? 0 : *rel);
  }
  return rels;
}

int count_relevant(const Judgments& judgments) {
  int n = 0;
  for (const auto& [doc, rel] : judgments) n += rel > 0 ? 1 : 0;
  return n;
}

std::vector<int> ideal_gains(const Judgments& judgments) {
  std::vector<int> gains;
  for (const auto& [doc, rel] : judgments) {
    if (rel > 0) gains.push_back(rel);
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  return gains;
}

namespace kernels {

double average_precision(std::span<const int> rels, int num_rel) {
  if (num_rel <= 0) return 0.0;
  double sum = 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    if (rels[i] > 0) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / num_rel;
}

double dcg(std::span<const int> gains, std::size_t depth) {
  const std::size_t n = std::min(depth, gains.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (gains[i] > 0) sum += gains[i] / std::log2(static_cast<double>(i + 2));
  }
  return sum;
}

double ndcg(std::span<const int> rels, std::span<const int> ideal,
            std::optional<std::size_t> cutoff) {
  const std::size_t depth = cutoff.value_or(std::max(rels.size(), ideal.size()));
  const double ideal_dcg = dcg(ideal, depth);
  if (ideal_dcg <= 0.0) return 0.0;
  return dcg(rels, depth) / ideal_dcg;
}

double precision_at(std::span<const int> rels, std::size_t k) {
  if (k == 0) return 0.0;
  const std::size_t n = std::min(k, rels.size());
  return static_cast<double>(relevant_retrieved(rels.first(n))) /
         static_cast<double>(k);
}

double reciprocal_rank(std::span<const int> rels) {
  for (std::size_t i = 0; i < rels.size(); ++i) {
    if (rels[i] > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

int relevant_retrieved(std::span<const int> rels) {
  return static_cast<int>(
      std::count_if(rels.begin(), rels.end(), [](int r) { return r > 0; }));
}

}  // namespace kernels

double average_precision(const OrderedRanking& ranking, const Judgments& judgments,
                         int num_rel) {
  return kernels::average_precision(relevance_by_rank(ranking, judgments), num_rel);
}

double ndcg(const OrderedRanking& ranking, const Judgments& judgments,
            std::optional<std::size_t> cutoff) {
  return kernels::ndcg(relevance_by_rank(ranking, judgments), ideal_gains(judgments),
                       cutoff);
}

double precision_at_k(const OrderedRanking& ranking, const Judgments& judgments,
                      std::size_t k) {
  return kernels::precision_at(relevance_by_rank(ranking, judgments), k);
}

}  // namespace trevl
