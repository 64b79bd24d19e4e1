#include "trevl/measures.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>

#include "trevl/errors.hpp"

namespace trevl {
namespace {

constexpr std::array kAllMeasures = {
    Measure::kMap,      Measure::kNdcg,     Measure::kNdcgCut,
    Measure::kPrecision, Measure::kRecipRank, Measure::kNumRel,
    Measure::kNumRet,   Measure::kNumRelRet,
};

std::optional<Measure> lookup(std::string_view name) {
  for (Measure m : kAllMeasures) {
    if (measure_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string supported_list() {
  std::string out;
  for (Measure m : kAllMeasures) {
    if (!out.empty()) out += ", ";
    out += measure_name(m);
  }
  return out;
}

std::vector<std::size_t> parse_cutoffs(std::string_view token, std::string_view list) {
  std::vector<std::size_t> cutoffs;
  while (true) {
    const auto comma = list.find(',');
    const std::string_view item = list.substr(0, comma);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || k == 0) {
      throw UnknownMeasureError("malformed cutoff list in '" + std::string(token) + "'");
    }
    cutoffs.push_back(k);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  return cutoffs;
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kMap: return "map";
    case Measure::kNdcg: return "ndcg";
    case Measure::kNdcgCut: return "ndcg_cut";
    case Measure::kPrecision: return "P";
    case Measure::kRecipRank: return "recip_rank";
    case Measure::kNumRel: return "num_rel";
    case Measure::kNumRet: return "num_ret";
    case Measure::kNumRelRet: return "num_rel_ret";
  }
  return "";
}

bool takes_cutoffs(Measure m) {
  return m == Measure::kNdcgCut || m == Measure::kPrecision;
}

bool is_count_measure(Measure m) {
  return m == Measure::kNumRel || m == Measure::kNumRet || m == Measure::kNumRelRet;
}

bool is_count_measure(std::string_view measure_id) {
  return measure_id == "num_rel" || measure_id == "num_ret" ||
         measure_id == "num_rel_ret";
}

std::set<std::string> supported_measures() {
  std::set<std::string> out;
  for (Measure m : kAllMeasures) out.emplace(measure_name(m));
  return out;
}

const std::vector<std::size_t>& default_cutoffs() {
  static const std::vector<std::size_t> cutoffs = {5, 10, 15, 20, 30, 100, 200, 500, 1000};
  return cutoffs;
}

MeasureSelection MeasureSelection::parse(std::span<const std::string> tokens) {
  MeasureSelection selection;
  for (const auto& token : tokens) selection.add(token);
  return selection;
}

MeasureSelection MeasureSelection::parse(std::initializer_list<std::string> tokens) {
  return parse(std::span(tokens.begin(), tokens.size()));
}

MeasureSelection MeasureSelection::all() { return parse({"all"}); }

void MeasureSelection::add(std::string_view token) {
  if (token == "all" || token == "all_trec") {
    for (Measure m : kAllMeasures) add(measure_name(m));
    return;
  }

  const auto dot = token.find('.');
  const std::string_view name = token.substr(0, dot);
  const std::optional<Measure> measure = lookup(name);
  if (!measure) {
    throw UnknownMeasureError("unknown measure '" + std::string(token) +
                              "'; supported: " + supported_list());
  }

  std::vector<std::size_t> cutoffs;
  if (dot != std::string_view::npos) {
    if (!takes_cutoffs(*measure)) {
      throw UnknownMeasureError("measure '" + std::string(name) +
                                "' does not take cutoffs");
    }
    cutoffs = parse_cutoffs(token, token.substr(dot + 1));
  } else if (takes_cutoffs(*measure)) {
    cutoffs = default_cutoffs();
  }

  auto existing = std::find_if(requests_.begin(), requests_.end(),
                               [&](const auto& r) { return r.measure == *measure; });
  if (existing == requests_.end()) {
    requests_.push_back({*measure, {}});
    existing = std::prev(requests_.end());
  }
  auto& merged = existing->cutoffs;
  merged.insert(merged.end(), cutoffs.begin(), cutoffs.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
}

std::vector<std::string> MeasureSelection::ids() const {
  std::vector<std::string> out;
  for (const auto& request : requests_) {
    const std::string name(measure_name(request.measure));
    if (!takes_cutoffs(request.measure)) {
      out.push_back(name);
      continue;
    }
    for (std::size_t k : request.cutoffs) out.push_back(name + "_" + std::to_string(k));
  }
  return out;
}

std::vector<std::string> MeasureSelection::tokens() const {
  std::vector<std::string> out;
  for (const auto& request : requests_) {
    std::string token(measure_name(request.measure));
    for (std::size_t i = 0; i < request.cutoffs.size(); ++i) {
      token += (i == 0 ? "." : ",") + std::to_string(request.cutoffs[i]);
    }
    out.push_back(std::move(token));
  }
  return out;
}

}  // namespace trevl
