#include "trevl/trec_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "trevl/errors.hpp"
#include "trevl/measures.hpp"

namespace trevl {
namespace {

bool is_field_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

/// Splits into at most N+1 fields; returns the field count seen (capped at N+1).
template <std::size_t N>
std::size_t split_fields(std::string_view line, std::array<std::string_view, N>& fields) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_field_space(line[i])) ++i;
    if (i == line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !is_field_space(line[i])) ++i;
    if (count == N) return N + 1;
    fields[count++] = line.substr(start, i - start);
  }
  return count;
}

template <typename Number>
bool parse_number(std::string_view field, Number& out) {
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

template <typename Value, std::size_t Fields, typename RecordFn>
QuerySet<Value> parse_records(std::istream& in, RecordFn&& record) {
  QuerySet<Value> set;
  std::array<std::string_view, Fields> fields;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t n = split_fields(line, fields);
    if (n == 0) continue;
    if (n != Fields) {
      throw ParseError(line_no, "expected " + std::to_string(Fields) +
                                    " fields, found " +
                                    (n > Fields ? "more" : std::to_string(n)));
    }
    record(set, fields, line_no);
  }
  if (in.bad()) throw InputError("read error after line " + std::to_string(line_no));
  return set;
}

template <typename Value>
void add_checked(QuerySet<Value>& set, std::string_view qid, std::string_view doc,
                 Value value, std::size_t line_no) {
  if (!set.docs(std::string(qid)).insert(std::string(doc), value)) {
    throw DuplicateError("line " + std::to_string(line_no) + ": duplicate document '" +
                         std::string(doc) + "' for query '" + std::string(qid) + "'");
  }
}

void check_token(std::string_view token, std::string_view what) {
  if (token.empty()) throw InputError(std::string(what) + " is empty");
  for (char c : token) {
    if (is_field_space(c) || c == '\n') {
      throw InputError(std::string(what) + " '" + std::string(token) + "' contains whitespace");
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

RunSet parse_run(std::istream& in) {
  return parse_records<double, 6>(in, [](RunSet& set, const auto& f, std::size_t line_no) {
    double score = 0.0;
    if (!parse_number(f[4], score)) {
      throw ParseError(line_no, "score '" + std::string(f[4]) + "' is not a number");
    }
    if (!std::isfinite(score)) {
      throw ParseError(line_no, "score '" + std::string(f[4]) + "' is not finite");
    }
    add_checked(set, f[0], f[2], score, line_no);
  });
}

QrelSet parse_qrel(std::istream& in) {
  return parse_records<int, 4>(in, [](QrelSet& set, const auto& f, std::size_t line_no) {
    int rel = 0;
    if (!parse_number(f[3], rel)) {
      throw ParseError(line_no, "relevance '" + std::string(f[3]) + "' is not an integer");
    }
    add_checked(set, f[0], f[2], rel, line_no);
  });
}

RunSet read_run_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_run(in);
}

QrelSet read_qrel_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_qrel(in);
}

std::string format_score(double score) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), score,
                           std::chars_format::fixed, 6);
  double back = 0.0;
  std::from_chars(buf.data(), res.ptr, back);
  if (back != score) {
    res = std::to_chars(buf.data(), buf.data() + buf.size(), score);
  }
  return std::string(buf.data(), res.ptr);
}

void write_run(const RunSet& run, std::string_view run_tag, std::ostream& out) {
  check_token(run_tag, "run tag");
  for (const auto& [qid, docs] : run) {
    check_token(qid, "query id");
    std::size_t rank = 1;
    for (const auto& [doc, score] : docs) {
      check_token(doc, "document id");
      out << qid << " Q0 " << doc << ' ' << rank++ << ' ' << format_score(score) << ' '
          << run_tag << '\n';
    }
  }
  if (!out) throw std::ios_base::failure("failed writing run");
}

void write_qrel(const QrelSet& qrel, std::ostream& out) {
  for (const auto& [qid, docs] : qrel) {
    check_token(qid, "query id");
    for (const auto& [doc, rel] : docs) {
      check_token(doc, "document id");
      out << qid << " 0 " << doc << ' ' << rel << '\n';
    }
  }
  if (!out) throw std::ios_base::failure("failed writing qrel");
}

std::string format_results(const ResultSet& results,
                           const std::vector<std::pair<std::string, double>>& aggregates,
                           bool per_query) {
  std::string text;
  char value[64];
  auto emit = [&](const std::string& measure, const std::string& qid, double v) {
    std::snprintf(value, sizeof value, is_count_measure(measure) ? "%.0f" : "%.4f", v);
    text += measure;
    text += '\t';
    text += qid;
    text += '\t';
    text += value;
    text += '\n';
  };

  if (per_query) {
    for (const auto& [qid, values] : results.per_query) {
      for (const auto& id : results.measure_ids) {
        auto it = values.find(id);
        if (it != values.end()) emit(id, qid, it->second);
      }
    }
  }
  for (const auto& [id, v] : aggregates) emit(id, "all", v);
  return text;
}

}  // namespace trevl
