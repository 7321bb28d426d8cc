#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fwsvm/dataset.hpp"
#include "fwsvm/kernel.hpp"
#include "fwsvm/model.hpp"
#include "fwsvm/problem.hpp"
#include "fwsvm/selection.hpp"

namespace fwsvm {

struct SolverConfig {
  SelectionStrategy strategy;
  double epsilon = 1e-4;
  std::size_t max_iters = 1'000'000;
  // Consecutive iterations with stopping gap <= epsilon required to stop.
  std::size_t patience = 1;
  // Sampled mode only: evaluate the exact gap every this many iterations (0 = never).
  std::size_t exact_gap_every = 0;
  // Recompute objective and gradient densely every this many iterations (0 = never).
  std::size_t resync_every = 0;
  std::uint64_t seed = 0;
  CacheConfig cache;

  // Throws ConfigError.
  void validate(std::size_t m) const;
};

enum class Termination { gap_converged, max_iters };
std::string to_string(Termination t);

struct RunTrace {
  std::vector<StepRecord> steps;
};

struct RunTimings {
  double solve_seconds = 0.0;       // iteration work only
  double diagnostic_seconds = 0.0;  // exact-gap diagnostics and resync checks
};

struct RunSummary {
  std::size_t m = 0;
  std::size_t sample_size = 0;  // 0 = full scan
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  Termination termination = Termination::max_iters;
  double final_gap = 0.0;  // stopping gap at the returned iterate
  double final_exact_gap = 0.0;  // always evaluated at the returned iterate
  double final_objective = 0.0;
  std::size_t support_vectors = 0;
  double mean_support_size = 0.0;  // mean |I| over iterations performed
  // |S| < m / mean_support_size; always false in full mode.
  bool sampling_advisable = false;
  RunTimings timings;
  CacheStats cache;
  std::size_t kernel_evaluations = 0;
  std::size_t resync_checks = 0;
  double max_resync_objective_error = 0.0;
  double max_resync_gradient_error = 0.0;
};

struct SolveResult {
  SvmModel model;
  RunTrace trace;
  RunSummary summary;
  IterateState state;
};

// Aggregates a finished run. Support sizes come from the trace; with an empty
// trace the final model's support count stands in.
RunSummary run_summary(const RunTrace& trace, const SvmModel& model, const RunTimings& timings);

// Frank-Wolfe loop. Full scan stops on the exact gap, random sampling on the
// sampled gap. The start vertex is drawn uniformly from a seed-derived stream
// independent of the sampling stream, so both modes start alike.
SolveResult solve(const SparseDataset& ds, const KernelSpec& spec, const SolverConfig& cfg);

// Start vertex chosen by solve() for a given seed and size.
std::size_t initial_vertex(std::size_t m, std::uint64_t seed);

}  // namespace fwsvm
