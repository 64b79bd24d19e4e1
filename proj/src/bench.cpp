#include "trevl/bench.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trevl/errors.hpp"
#include "trevl/evaluator.hpp"
#include "trevl/trec_io.hpp"

extern char** environ;

namespace trevl::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

class FileActions {
 public:
  FileActions() { posix_spawn_file_actions_init(&actions_); }
  ~FileActions() { posix_spawn_file_actions_destroy(&actions_); }
  FileActions(const FileActions&) = delete;
  FileActions& operator=(const FileActions&) = delete;
  posix_spawn_file_actions_t* get() { return &actions_; }

 private:
  posix_spawn_file_actions_t actions_;
};

}  // namespace

Workload synthesize_workload(std::size_t n_queries, std::size_t n_docs) {
  if (n_queries == 0 || n_docs == 0) {
    throw std::invalid_argument("workload needs at least one query and one document");
  }
  Workload w;
  for (std::size_t q = 0; q < n_queries; ++q) {
    const std::string qid = "q" + std::to_string(q + 1);
    auto& judged = w.qrel.docs(qid);
    auto& scored = w.run.docs(qid);
    judged.reserve(n_docs);
    scored.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
      const std::string doc = "d" + std::to_string(d + 1);
      judged.insert(doc, 1);
      scored.insert(doc, static_cast<double>(n_docs - d));
    }
  }
  return w;
}

Timing time_in_process(const Workload& workload, const MeasureSelection& measures,
                       TimingOptions options) {
  auto once = [&] {
    Evaluator evaluator(workload.qrel, measures);
    return evaluator.evaluate(workload.run).evaluated_query_count();
  };

  Timing timing;
  volatile std::size_t sink = 0;
  if (options.warmup) sink = once();
  for (std::size_t i = 0; i < options.repetitions; ++i) {
    const auto start = Clock::now();
    sink = once();
    timing.samples.push_back(seconds_since(start));
  }
  static_cast<void>(sink);
  timing.mean_seconds = mean(timing.samples);
  return timing;
}

ProcessOutput run_process(const std::filesystem::path& program,
                          const std::vector<std::string>& args,
                          const std::filesystem::path& scratch) {
  const std::filesystem::path err_path = scratch / "trevl-bench.stderr";

  int pipe_fds[2];
  if (pipe(pipe_fds) != 0) {
    throw BenchmarkError(std::string("pipe failed: ") + std::strerror(errno));
  }

  FileActions actions;
  posix_spawn_file_actions_addclose(actions.get(), pipe_fds[0]);
  posix_spawn_file_actions_adddup2(actions.get(), pipe_fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(actions.get(), pipe_fds[1]);
  posix_spawn_file_actions_addopen(actions.get(), STDERR_FILENO, err_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back(program.string());
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawn(&pid, argv_storage[0].c_str(), actions.get(), nullptr,
                             argv.data(), environ);
  close(pipe_fds[1]);
  if (rc != 0) {
    close(pipe_fds[0]);
    throw BenchmarkError("cannot launch '" + program.string() + "': " + std::strerror(rc));
  }

  ProcessOutput output;
  char buf[1 << 16];
  while (true) {
    const ssize_t n = read(pipe_fds[0], buf, sizeof buf);
    if (n > 0) {
      output.out.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      break;
    }
  }
  close(pipe_fds[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  output.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  output.err = read_file(err_path);
  std::error_code ec;
  std::filesystem::remove(err_path, ec);
  return output;
}

Timing time_subprocess_workflow(const Workload& workload, const MeasureSelection& measures,
                                TimingOptions options, const std::filesystem::path& scratch,
                                const std::filesystem::path& external) {
  if (access(external.c_str(), X_OK) != 0) {
    throw BenchmarkError("external evaluator '" + external.string() + "' is not executable");
  }
  std::error_code ec;
  std::filesystem::create_directories(scratch, ec);
  if (!std::filesystem::is_directory(scratch)) {
    throw BenchmarkError("scratch directory '" + scratch.string() + "' is unusable");
  }

  const std::filesystem::path qrel_path = scratch / "trevl-bench.qrel";
  const std::filesystem::path run_path = scratch / "trevl-bench.run";
  std::vector<std::string> args;
  for (const auto& token : measures.tokens()) {
    args.push_back("-m");
    args.push_back(token);
  }
  args.push_back(qrel_path.string());
  args.push_back(run_path.string());

  Timing timing;
  auto once = [&] {
    {
      std::ofstream qrel_out(qrel_path);
      write_qrel(workload.qrel, qrel_out);
      std::ofstream run_out(run_path);
      write_run(workload.run, "trevl", run_out);
    }
    ProcessOutput result = run_process(external, args, scratch);
    ++timing.processes_launched;
    std::filesystem::remove(qrel_path, ec);
    std::filesystem::remove(run_path, ec);
    if (result.exit_status != 0) {
      throw BenchmarkError("'" + external.string() + "' exited with status " +
                           std::to_string(result.exit_status) + ": " + result.err);
    }
    return std::move(result.out);
  };

  if (options.warmup) timing.last_stdout = once();
  for (std::size_t i = 0; i < options.repetitions; ++i) {
    const auto start = Clock::now();
    std::string out = once();
    timing.samples.push_back(seconds_since(start));
    timing.last_stdout = std::move(out);
  }
  timing.mean_seconds = mean(timing.samples);
  return timing;
}

void BenchConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (query_counts.empty() || doc_counts.empty()) {
    throw ConfigError("query and document counts must be non-empty");
  }
  for (std::size_t n : query_counts) {
    if (n < 1) throw ConfigError("query counts must be at least 1");
  }
  for (std::size_t n : doc_counts) {
    if (n < 1) throw ConfigError("document counts must be at least 1");
  }
  if (external.empty()) throw ConfigError("an external evaluator is required");
  if (scratch.empty()) throw ConfigError("a scratch directory is required");
  if (measures.empty()) throw ConfigError("no measures selected");
}

std::vector<SpeedupCell> speedup_grid(const BenchConfig& config,
                                      const std::function<void(const SpeedupCell&)>& on_cell) {
  config.validate();
  const TimingOptions options{config.repetitions, config.warmup};
  std::vector<SpeedupCell> cells;
  for (std::size_t n_queries : config.query_counts) {
    for (std::size_t n_docs : config.doc_counts) {
      const Workload workload = synthesize_workload(n_queries, n_docs);
      SpeedupCell cell;
      cell.n_queries = n_queries;
      cell.n_docs = n_docs;
      cell.in_process_seconds = time_in_process(workload, config.measures, options).mean_seconds;
      cell.subprocess_seconds = time_subprocess_workflow(workload, config.measures, options,
                                                         config.scratch, config.external)
                                    .mean_seconds;
      cell.speedup = cell.subprocess_seconds / cell.in_process_seconds;
      if (on_cell) on_cell(cell);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_report_header(std::ostream& out) {
  out << "n_queries\tn_docs\tt_inproc\tt_subproc\tspeedup\n";
}

void write_report_row(const SpeedupCell& cell, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%zu\t%zu\t%.6e\t%.6e\t%.3f\n", cell.n_queries, cell.n_docs,
                cell.in_process_seconds, cell.subprocess_seconds, cell.speedup);
  out << line;
}

void write_report(const std::vector<SpeedupCell>& cells, std::ostream& out) {
  write_report_header(out);
  for (const auto& cell : cells) write_report_row(cell, out);
}

}  // namespace trevl::bench
