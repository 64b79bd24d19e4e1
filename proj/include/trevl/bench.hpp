#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "trevl/measures.hpp"
#include "trevl/query_set.hpp"

namespace trevl::bench {

struct Workload {
  QrelSet qrel;
  RunSet run;
};

/// n_queries queries "q<i>", each retrieving n_docs documents "d<j>" with
/// distinct natural scores n_docs..1, all judged relevant at level 1.
/// Throws std::invalid_argument if either count is 0.
Workload synthesize_workload(std::size_t n_queries, std::size_t n_docs);

struct TimingOptions {
  std::size_t repetitions = 20;
  /// One untimed run before the timed ones.
  bool warmup = true;
};

struct Timing {
  double mean_seconds = 0.0;
  std::vector<double> samples;
  std::size_t processes_launched = 0;  // includes the warm-up
  std::string last_stdout;
};

/// Times Evaluator construction plus evaluate() with a monotonic clock.
Timing time_in_process(const Workload& workload, const MeasureSelection& measures,
                       TimingOptions options = {});

/// Each repetition writes the run and qrel into `scratch`, launches
/// `external -m <measure> ... <qrel> <run>`, reads its whole stdout into a
/// string (values are not extracted), and deletes the files.
/// Throws BenchmarkError if the executable is missing or exits non-zero
/// (the message carries its stderr).
Timing time_subprocess_workflow(const Workload& workload, const MeasureSelection& measures,
                                TimingOptions options, const std::filesystem::path& scratch,
                                const std::filesystem::path& external);

struct ProcessOutput {
  int exit_status = 0;
  std::string out;
  std::string err;
};

/// Runs `program args...` and captures both output streams. stderr is
/// staged through a file in `scratch`. Throws BenchmarkError if the process
/// cannot be started.
ProcessOutput run_process(const std::filesystem::path& program,
                          const std::vector<std::string>& args,
                          const std::filesystem::path& scratch);

struct BenchConfig {
  std::vector<std::size_t> query_counts;
  std::vector<std::size_t> doc_counts;
  std::size_t repetitions = 20;
  bool warmup = true;
  std::filesystem::path scratch;
  std::filesystem::path external;
  MeasureSelection measures = MeasureSelection::parse({"map", "ndcg"});

  /// Throws ConfigError.
  void validate() const;
};

struct SpeedupCell {
  std::size_t n_queries = 0;
  std::size_t n_docs = 0;
  double in_process_seconds = 0.0;
  double subprocess_seconds = 0.0;
  double speedup = 0.0;  // subprocess / in-process
};

/// One cell per (query count, doc count), query counts outermost.
std::vector<SpeedupCell> speedup_grid(
    const BenchConfig& config, const std::function<void(const SpeedupCell&)>& on_cell = {});

/// "n_queries\tn_docs\tt_inproc\tt_subproc\tspeedup" then one row per cell.
void write_report_header(std::ostream& out);
void write_report_row(const SpeedupCell& cell, std::ostream& out);
void write_report(const std::vector<SpeedupCell>& cells, std::ostream& out);

}  // namespace trevl::bench
