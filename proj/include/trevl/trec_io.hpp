#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trevl/evaluator.hpp"
#include "trevl/query_set.hpp"

namespace trevl {

// Run lines:  <qid> <literal> <docid> <rank> <score> <tag>
// Qrel lines: <qid> <iter> <docid> <rel>
// Fields are separated by any run of spaces or tabs. Blank lines are skipped.
// The literal, rank, iteration and tag fields are read but not kept.

/// Throws ParseError (with the 1-based line) on a wrong field count, a
/// non-numeric or non-finite score, and DuplicateError on a repeated
/// (query, doc) pair.
RunSet parse_run(std::istream& in);
QrelSet parse_qrel(std::istream& in);

/// Throws InputError if the file cannot be opened.
RunSet read_run_file(const std::filesystem::path& path);
QrelSet read_qrel_file(const std::filesystem::path& path);

/// One line per (query, doc) in insertion order with a per-query 1-based rank
/// counter. Scores use 6 decimals when that is exact and the shortest
/// round-trip form otherwise, so parse_run(write_run(r)) == r always holds.
/// Throws InputError on ids or tags that are empty or contain whitespace and
/// std::ios_base::failure if the stream goes bad.
void write_run(const RunSet& run, std::string_view run_tag, std::ostream& out);
void write_qrel(const QrelSet& qrel, std::ostream& out);

/// Score as written by write_run.
std::string format_score(double score);

/// "measure\tqid\tvalue" lines with 4-decimal values, or integers for the
/// count measures. Per-query lines (by query id, then measure order) come
/// first and only when `per_query` is set; the "all" lines always follow.
std::string format_results(const ResultSet& results,
                           const std::vector<std::pair<std::string, double>>& aggregates,
                           bool per_query);

}  // namespace trevl
