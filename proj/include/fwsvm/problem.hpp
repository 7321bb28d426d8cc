#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fwsvm/kernel.hpp"

namespace fwsvm {

struct ResyncReport;

// Frank-Wolfe iterate for min 1/2 a'Ka over the unit simplex.
//
// alpha is stored densely; support lists {i : alpha_i > 0} in the order the
// coordinates entered it. The objective is maintained by the quadratic
// expansion of each step, and in full-scan mode the whole gradient Ka is
// maintained by the convex-combination recurrence.
class IterateState {
 public:
  // alpha = e_vertex. With maintain_gradient the gradient is K's vertex row.
  static IterateState at_vertex(CachedKernel& kernel, std::size_t vertex, bool maintain_gradient);

  std::size_t dimension() const noexcept { return alpha_.size(); }
  std::span<const double> alpha() const noexcept { return alpha_; }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  double objective() const noexcept { return objective_; }
  bool has_gradient() const noexcept { return !gradient_.empty(); }
  std::span<const double> gradient() const noexcept { return gradient_; }
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  friend double fw_step(IterateState&, std::size_t, double, CachedKernel&);
  friend ResyncReport resync(IterateState&, const KernelMatrix&);

  std::vector<double> alpha_;
  std::vector<std::size_t> support_;
  std::vector<double> gradient_;
  double objective_ = 0.0;
  std::size_t iteration_ = 0;
};

// One row of the per-iteration trace. Quantities describe the iterate the
// step started from; vertex and lambda describe the step taken.
struct StepRecord {
  std::size_t iteration = 0;
  std::size_t vertex = 0;
  double lambda = 0.0;
  double gap_approx = 0.0;
  std::optional<double> gap_exact;
  double objective = 0.0;
  std::size_t support_size = 0;
  double elapsed_seconds = 0.0;
};

// sum_{j in support} K_ij alpha_j, in support order. O(|support|) kernel entries;
// rows already in the cache are read instead of recomputed.
double gradient_component(const IterateState& state, CachedKernel& kernel, std::size_t i);

// gradient_component for every index in `indices`, written to out[k]. Walks
// the support once, so each resident support row costs one cache lookup.
// Produces bit-identical values to gradient_component.
void gradient_components(const IterateState& state, CachedKernel& kernel,
                         std::span<const std::size_t> indices, std::span<double> out);

// Transposed copy of the kernel columns of the current support, so that
// value(i, t) = K(i, support[t]) is contiguous in t. Many gradient components
// can then be summed over sequential memory instead of gathering one entry
// from each cached support row. Filled from the row cache; grows by one
// column per new support index and restarts when the support collapses.
class SupportColumns {
 public:
  explicit SupportColumns(std::size_t max_columns) : max_columns_(max_columns) {}

  // Mirrors state.support(). Returns false (and holds nothing) when the
  // support has more than max_columns indices.
  bool sync(const IterateState& state, CachedKernel& kernel);

  std::size_t columns() const noexcept { return columns_.size(); }

  // Same values, bit for bit, as gradient_components. Requires a successful sync.
  void components(const IterateState& state, std::span<const std::size_t> indices,
                  std::span<double> out) const;

 private:
  void clear();

  std::size_t max_columns_;
  std::vector<std::size_t> columns_;
  std::vector<std::vector<double>> by_row_;
};

// Exact line search towards e_vertex and the in-place update of alpha, the
// support, the objective and (if maintained) the gradient. vertex_gradient
// must be the gradient component at `vertex`. Returns lambda in [0, 1].
// Throws NumericalError when the curvature along the direction is not
// strictly positive and finite.
double fw_step(IterateState& state, std::size_t vertex, double vertex_gradient, CachedKernel& kernel);

// Step that looks up the gradient component itself.
double fw_step(IterateState& state, std::size_t vertex, CachedKernel& kernel);

// 2 f - min_i grad_i (>= 0 up to roundoff). Uses the maintained gradient
// when present, otherwise recomputes all m components.
double exact_gap(const IterateState& state, CachedKernel& kernel);

// 2 f - g_S with g_S the smallest gradient component over a sample.
inline double approx_gap(const IterateState& state, double sampled_min_gradient) noexcept {
  return 2.0 * state.objective() - sampled_min_gradient;
}

// Dense 1/2 sum_ij a_i K_ij a_j straight from kernel entries; the oracle for
// the maintained objective. Throws std::invalid_argument unless alpha lies on
// the simplex (within 1e-9).
double objective_bruteforce(std::span<const double> alpha, const KernelMatrix& kernel);

// Dense K alpha from kernel entries; the oracle for the maintained gradient.
std::vector<double> gradient_bruteforce(std::span<const double> alpha, const KernelMatrix& kernel);

struct ResyncReport {
  double objective_rel_error = 0.0;  // |f_maint - f_dense| / |f_dense|
  double gradient_rel_error = 0.0;   // ||g_maint - g_dense||_inf / ||g_dense||_inf
};

// Replaces maintained objective and gradient by dense recomputations and
// reports how far they had drifted.
ResyncReport resync(IterateState& state, const KernelMatrix& kernel);

}  // namespace fwsvm
