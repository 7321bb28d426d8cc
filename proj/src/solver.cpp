#include "fwsvm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fwsvm/error.hpp"

namespace fwsvm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kSampleStream = 1;

}  // namespace

std::string to_string(Termination t) {
  return t == Termination::gap_converged ? "gap-converged" : "max-iters";
}

void SolverConfig::validate(std::size_t m) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (strategy.kind == StrategyKind::random &&
      (strategy.sample_size < 1 || strategy.sample_size > m)) {
    throw ConfigError("sample size " + std::to_string(strategy.sample_size) + " outside [1, " +
                      std::to_string(m) + "]");
  }
}

std::size_t initial_vertex(std::size_t m, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kInitStream));
  return static_cast<std::size_t>(rng.uniform_index(m));
}

RunSummary run_summary(const RunTrace& trace, const SvmModel& model, const RunTimings& timings) {
  RunSummary s;
  s.iterations = trace.steps.size();
  s.support_vectors = model.support_count();
  s.timings = timings;
  if (trace.steps.empty()) {
    s.mean_support_size = static_cast<double>(model.support_count());
  } else {
    double total = 0.0;
    for (const auto& r : trace.steps) total += static_cast<double>(r.support_size);
    s.mean_support_size = total / static_cast<double>(trace.steps.size());
  }
  return s;
}

SolveResult solve(const SparseDataset& ds, const KernelSpec& spec, const SolverConfig& cfg) {
  const std::size_t m = ds.size();
  if (m == 0) throw ConfigError("cannot train on an empty dataset");
  cfg.validate(m);

  CachedKernel kernel(ds, spec, cfg.cache);
  const bool full = cfg.strategy.kind == StrategyKind::full;
  RunTimings timings;
  RunTrace trace;

  auto t_start = Clock::now();
  IterateState state = IterateState::at_vertex(kernel, initial_vertex(m, cfg.seed), full);
  std::optional<WorkingSetSampler> sampler;
  if (!full) sampler.emplace(m, cfg.strategy.sample_size, derive_seed(cfg.seed, kSampleStream));
  std::vector<double> scratch;
  // Bounded by the row-cache capacity: the block holds the same numbers as
  // the cached support rows, transposed.
  SupportColumns columns(kernel.capacity());
  timings.solve_seconds += seconds_since(t_start);

  std::size_t resync_checks = 0;
  double max_f_err = 0.0, max_g_err = 0.0;
  std::size_t below = 0;
  Termination termination = Termination::max_iters;
  double last_gap = 0.0;
  std::optional<double> last_exact;

  for (std::size_t k = 0;; ++k) {
    const auto t_iter = Clock::now();
    Selection sel;
    double gap = 0.0;
    if (full) {
      sel = select_full(state);
      gap = 2.0 * state.objective() - sel.gradient;
    } else {
      sel = select_sampled(state, kernel, *sampler, scratch, &columns).best;
      gap = approx_gap(state, sel.gradient);
    }
    const double select_seconds = seconds_since(t_iter);
    timings.solve_seconds += select_seconds;

    std::optional<double> exact;
    if (full) {
      exact = gap;
    } else if (cfg.exact_gap_every > 0 && k % cfg.exact_gap_every == 0) {
      const auto t_diag = Clock::now();
      exact = exact_gap(state, kernel);
      timings.diagnostic_seconds += seconds_since(t_diag);
    }
    last_gap = gap;
    last_exact = exact;

    below = gap <= cfg.epsilon ? below + 1 : 0;
    if (below >= cfg.patience) {
      termination = Termination::gap_converged;
      break;
    }
    if (k >= cfg.max_iters) break;

    StepRecord rec;
    rec.iteration = k;
    rec.vertex = sel.index;
    rec.gap_approx = gap;
    rec.gap_exact = exact;
    rec.objective = state.objective();
    rec.support_size = state.support().size();

    const auto t_step = Clock::now();
    rec.lambda = fw_step(state, sel.index, sel.gradient, kernel);
    const double step_seconds = seconds_since(t_step);
    timings.solve_seconds += step_seconds;
    rec.elapsed_seconds = select_seconds + step_seconds;
    trace.steps.push_back(rec);

    if (cfg.resync_every > 0 && (k + 1) % cfg.resync_every == 0) {
      const auto t_diag = Clock::now();
      const ResyncReport rep = resync(state, kernel.matrix());
      ++resync_checks;
      max_f_err = std::max(max_f_err, rep.objective_rel_error);
      max_g_err = std::max(max_g_err, rep.gradient_rel_error);
      timings.diagnostic_seconds += seconds_since(t_diag);
    }
  }

  if (!last_exact) {
    const auto t_diag = Clock::now();
    last_exact = exact_gap(state, kernel);
    timings.diagnostic_seconds += seconds_since(t_diag);
  }

  SvmModel model = SvmModel::from_iterate(ds, spec, state);
  RunSummary summary = run_summary(trace, model, timings);
  summary.m = m;
  summary.sample_size = full ? 0 : cfg.strategy.sample_size;
  summary.seed = cfg.seed;
  summary.termination = termination;
  summary.final_gap = last_gap;
  summary.final_exact_gap = *last_exact;
  summary.final_objective = state.objective();
  summary.sampling_advisable =
      !full && static_cast<double>(cfg.strategy.sample_size) < static_cast<double>(m) / summary.mean_support_size;
  summary.cache = kernel.stats();
  summary.kernel_evaluations = kernel.matrix().evaluations();
  summary.resync_checks = resync_checks;
  summary.max_resync_objective_error = max_f_err;
  summary.max_resync_gradient_error = max_g_err;
  return SolveResult{std::move(model), std::move(trace), summary, std::move(state)};
}

}  // namespace fwsvm
