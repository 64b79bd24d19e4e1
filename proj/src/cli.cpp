#include "trevl/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "trevl/errors.hpp"
#include "trevl/evaluator.hpp"
#include "trevl/measures.hpp"
#include "trevl/trec_io.hpp"

namespace trevl::cli {
namespace {

std::string supported_list() {
  std::string out;
  for (const auto& m : supported_measures()) out += (out.empty() ? "" : " ") + m;
  return out;
}

template <typename Fn>
auto with_path(const std::string& path, Fn&& read) {
  try {
    return read();
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

int evaluate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const MeasureSelection measures = config.measures.empty()
                                        ? MeasureSelection::all()
                                        : MeasureSelection::parse(config.measures);
  QrelSet qrel = with_path(config.qrel_path, [&] { return read_qrel_file(config.qrel_path); });
  const RunSet run = with_path(config.run_path, [&] { return read_run_file(config.run_path); });

  const Evaluator evaluator(std::move(qrel), measures, {.depth_cap = config.depth_cap});
  const ResultSet results = evaluator.evaluate(run);
  if (results.evaluated_query_count() == 0) {
    err << "trevl: no query appears in both '" << config.qrel_path << "' and '"
        << config.run_path << "'\n";
    return kExitError;
  }

  const auto mode = config.complete ? AggregateMode::kComplete : AggregateMode::kJudgedOnly;
  out << format_results(results, aggregate(results, mode), config.per_query);
  out.flush();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig config;
  CLI::App app{"trec_eval-compatible evaluation of a run against qrels", "trevl"};
  app.add_flag("-q", config.per_query, "Print per-query values before the summary");
  app.add_flag("-c", config.complete,
               "Average over every qrel query, scoring missing queries as 0");
  app.add_option("-M", config.depth_cap, "Evaluate at most this many documents per query")
      ->check(CLI::PositiveNumber);
  app.add_option("-m", config.measures,
                 "Measure to compute (repeatable): " + supported_list() +
                     ", all; cutoffs as P.5,10");
  app.add_option("qrel_file", config.qrel_path, "Relevance judgments")->required();
  app.add_option("run_file", config.run_path, "System run")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "trevl: " << e.what() << "\n" << app.help();
    return kExitError;
  }

  try {
    return evaluate(config, out, err);
  } catch (const std::exception& e) {
    err << "trevl: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace trevl::cli
