#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fwsvm/problem.hpp"
#include "fwsvm/rng.hpp"

namespace fwsvm {

enum class StrategyKind { full, random };

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::full;
  std::size_t sample_size = 0;  // |S|; random kind only
  std::uint64_t seed = 0;
};

// Parses "full", "random" or "adaptive". The latter is a reserved name for a
// future policy and is rejected with a ConfigError.
StrategyKind strategy_kind_from_string(const std::string& name);
std::string to_string(StrategyKind kind);

struct Selection {
  std::size_t index = 0;
  double gradient = 0.0;
};

// Smallest-index minimizer of the maintained gradient.
Selection select_full(const IterateState& state);

// Draws a fresh uniform sample without replacement on every call, in O(|S|).
class WorkingSetSampler {
 public:
  // Throws std::invalid_argument unless 1 <= sample_size <= m.
  WorkingSetSampler(std::size_t m, std::size_t sample_size, std::uint64_t seed);

  std::size_t sample_size() const noexcept { return sample_size_; }
  std::span<const std::size_t> draw();

 private:
  std::vector<std::size_t> perm_;
  std::size_t sample_size_;
  Rng rng_;
};

struct SampledSelection {
  Selection best;
  std::span<const std::size_t> sample;  // valid until the sampler's next draw
};

// Draws S and returns the smallest-index minimizer of grad_i over i in S,
// computing only those |S| gradient components. `scratch` is resized as
// needed. When `columns` is given and can mirror the support, components are
// read from it; the result is identical either way.
SampledSelection select_sampled(const IterateState& state, CachedKernel& kernel,
                                WorkingSetSampler& sampler, std::vector<double>& scratch,
                                SupportColumns* columns = nullptr);

// Argmin over an explicit index set with the smallest-index tie rule.
Selection argmin_over(std::span<const std::size_t> indices, std::span<const double> values);

// Lower bound 1 - (m_tilde/m)^r on the probability that the minimum of a
// random r-subset of m values is <= at least m_tilde of them.
// Throws std::invalid_argument when m == 0, r == 0 or m_tilde > m.
double min_rank_bound(std::size_t m, std::size_t m_tilde, std::size_t r);

// Empirical frequency, over `trials` random r-subsets (without replacement)
// of m distinct random values, of the subset minimum being among the
// m - m_tilde smallest values. Deterministic given seed.
double min_rank_montecarlo(std::size_t m, std::size_t m_tilde, std::size_t r, std::size_t trials,
                           std::uint64_t seed);

}  // namespace fwsvm
