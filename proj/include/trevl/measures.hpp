#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trevl {

enum class Measure {
  kMap,
  kNdcg,
  kNdcgCut,
  kPrecision,
  kRecipRank,
  kNumRel,
  kNumRet,
  kNumRelRet,
};

/// trec_eval name of a measure ("ndcg_cut", "P", ...).
std::string_view measure_name(Measure m);

bool takes_cutoffs(Measure m);

/// Count measures are summed, not averaged, in the "all" row.
bool is_count_measure(Measure m);
bool is_count_measure(std::string_view measure_id);

/// Every measure this engine implements, by trec_eval name.
std::set<std::string> supported_measures();

/// {5, 10, 15, 20, 30, 100, 200, 500, 1000}
const std::vector<std::size_t>& default_cutoffs();

struct MeasureRequest {
  Measure measure;
  std::vector<std::size_t> cutoffs;  // ascending; empty unless takes_cutoffs
};

/// An ordered, validated set of measures. Built from trec_eval-style tokens:
/// "map", "ndcg_cut" (default cutoffs), "P.5,10" (explicit cutoffs), and
/// "all" / "all_trec" for the whole supported set.
class MeasureSelection {
 public:
  /// Throws UnknownMeasureError for unknown names or malformed cutoff lists.
  static MeasureSelection parse(std::span<const std::string> tokens);
  static MeasureSelection parse(std::initializer_list<std::string> tokens);
  static MeasureSelection all();

  const std::vector<MeasureRequest>& requests() const { return requests_; }
  bool empty() const { return requests_.empty(); }

  /// Expanded result ids in selection order: "map", "P_5", "P_10", ...
  std::vector<std::string> ids() const;

  /// Tokens that reproduce this selection on a trec_eval command line.
  std::vector<std::string> tokens() const;

 private:
  void add(std::string_view token);

  std::vector<MeasureRequest> requests_;
};

}  // namespace trevl
