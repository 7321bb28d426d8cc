#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwsvm/dataset.hpp"
#include "fwsvm/kernel.hpp"
#include "fwsvm/solver.hpp"

namespace fwsvm {

struct BenchPlan {
  std::string train_path;
  std::string test_path;
  bool remap_zero_one = false;
  // Optional desk-scale subsets of the loaded files.
  std::size_t train_subsample = 0;  // 0 = use everything
  std::size_t test_subsample = 0;
  std::uint64_t subsample_seed = 1;

  KernelSpec kernel;
  std::vector<std::size_t> sample_sizes = {0};  // 0 = full scan
  std::size_t repetitions = 10;
  std::uint64_t base_seed = 1;
  double epsilon = 1e-4;
  std::size_t max_iters = 1'000'000;
  std::size_t patience = 1;
  std::size_t exact_gap_every = 0;
  std::size_t resync_every = 0;
  CacheConfig cache;

  std::string out_dir;  // empty: no files written
  bool write_traces = true;
  std::size_t jobs = 1;

  // Throws ConfigError.
  void validate() const;
};

// Reads a JSON plan. Keys mirror BenchPlan fields; `sample_sizes` accepts
// integers and the string "full". Relative dataset paths resolve against the
// plan file's directory.
BenchPlan load_plan(const std::string& path);
BenchPlan parse_plan(const std::string& json_text, const std::string& base_dir = "");

struct RunRecord {
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::optional<RunSummary> summary;  // empty when the solve failed
  double test_accuracy = 0.0;
  double io_seconds = 0.0;  // trace serialization
  std::string error;
  RunTrace trace;  // kept only for the first seed of each cell
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

struct CellResult {
  std::size_t sample_size = 0;
  std::vector<RunRecord> runs;
  std::size_t failures = 0;
  Aggregate test_accuracy, solve_seconds, diagnostic_seconds, io_seconds, iterations,
      support_vectors, mean_support;
  bool sampling_advisable = false;  // majority vote over successful runs
};

struct BenchReport {
  std::size_t m_train = 0;
  std::size_t m_test = 0;
  std::vector<CellResult> cells;
};

Aggregate aggregate(const std::vector<double>& xs);

// Runs every (sample size, seed) cell on in-memory data. Seeds are
// base_seed .. base_seed + repetitions - 1 whatever the job count.
BenchReport run_benchmark(const BenchPlan& plan, const SparseDataset& train, const SparseDataset& test);

// Loads the plan's files, runs, and writes summary.csv, runs.csv, gaps.csv
// and traces/ under out_dir. Throws IoError naming the failing path.
BenchReport run_benchmark(const BenchPlan& plan);

// summary.csv: one row per cell.
void write_summary_csv(std::ostream& out, const BenchReport& report);
// runs.csv: one row per run.
void write_runs_csv(std::ostream& out, const BenchReport& report);
// Per-iteration trace. Wall-clock goes in a trailing column only when asked,
// so default traces are reproducible byte for byte.
void write_trace_csv(std::ostream& out, const RunTrace& trace, bool include_timing = false);

enum class GapSeries { approx, exact, both };

struct LabeledTrace {
  std::string label;
  const RunTrace* trace;
};

// Long-format `series,iteration,gap` rows, series "<label>:approx" or
// "<label>:exact". Exact rows exist only where the trace has them; asking for
// exact gaps from a trace with none throws ConfigError.
void emit_gap_figure_data(std::ostream& out, const std::vector<LabeledTrace>& traces, GapSeries which);

struct SamplingReport {
  std::size_t m = 0, m_tilde = 0, r = 0, trials = 0;
  double bound = 0.0;
  double empirical = 0.0;
  double sigma = 0.0;  // binomial std-dev of the estimate at p = bound
  bool pass = false;   // empirical >= bound - 3 sigma
};

SamplingReport verify_sampling(std::size_t m, std::size_t m_tilde, std::size_t r, std::size_t trials,
                               std::uint64_t seed);
void print_sampling_report(std::ostream& out, const SamplingReport& report);

std::string sample_size_label(std::size_t sample_size);

}  // namespace fwsvm
