#include "fwsvm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fwsvm/error.hpp"

namespace fwsvm {

StrategyKind strategy_kind_from_string(const std::string& name) {
  if (name == "full") return StrategyKind::full;
  if (name == "random") return StrategyKind::random;
  if (name == "adaptive") {
    throw ConfigError("strategy 'adaptive' is reserved but not implemented; use 'full' or 'random'");
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

std::string to_string(StrategyKind kind) { return kind == StrategyKind::full ? "full" : "random"; }

Selection argmin_over(std::span<const std::size_t> indices, std::span<const double> values) {
  if (indices.empty() || indices.size() != values.size()) {
    throw std::invalid_argument("argmin_over: empty or mismatched input");
  }
  Selection best{indices[0], values[0]};
  for (std::size_t k = 1; k < indices.size(); ++k) {
    if (values[k] < best.gradient || (values[k] == best.gradient && indices[k] < best.index)) {
      best = {indices[k], values[k]};
    }
  }
  return best;
}

Selection select_full(const IterateState& state) {
  if (!state.has_gradient()) throw std::logic_error("select_full requires a maintained gradient");
  const auto g = state.gradient();
  // min_element returns the first minimizer, which is the smallest index.
  const auto it = std::min_element(g.begin(), g.end());
  return {static_cast<std::size_t>(it - g.begin()), *it};
}

WorkingSetSampler::WorkingSetSampler(std::size_t m, std::size_t sample_size, std::uint64_t seed)
    : perm_(m), sample_size_(sample_size), rng_(seed) {
  if (sample_size < 1 || sample_size > m) {
    throw std::invalid_argument("sample size must lie in [1, m]");
  }
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
}

std::span<const std::size_t> WorkingSetSampler::draw() {
  partial_shuffle(perm_, sample_size_, rng_);
  // Ascending order makes the gathers over cached rows sequential. Any
  // arrangement of perm_ is a valid starting point for the next draw.
  std::sort(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(sample_size_));
  return std::span<const std::size_t>(perm_).first(sample_size_);
}

SampledSelection select_sampled(const IterateState& state, CachedKernel& kernel,
                                WorkingSetSampler& sampler, std::vector<double>& scratch,
                                SupportColumns* columns) {
  const auto sample = sampler.draw();
  scratch.resize(sample.size());
  if (columns != nullptr && columns->sync(state, kernel)) {
    columns->components(state, sample, scratch);
  } else {
    gradient_components(state, kernel, sample, scratch);
  }
  return {argmin_over(sample, scratch), sample};
}

double min_rank_bound(std::size_t m, std::size_t m_tilde, std::size_t r) {
  if (m == 0) throw std::invalid_argument("min_rank_bound: m must be positive");
  if (r == 0) throw std::invalid_argument("min_rank_bound: r must be positive");
  if (m_tilde > m) throw std::invalid_argument("min_rank_bound: m_tilde exceeds m");
  const double ratio = static_cast<double>(m_tilde) / static_cast<double>(m);
  return 1.0 - std::pow(ratio, static_cast<double>(r));
}

double min_rank_montecarlo(std::size_t m, std::size_t m_tilde, std::size_t r, std::size_t trials,
                           std::uint64_t seed) {
  if (m == 0 || r == 0 || r > m || m_tilde > m || trials == 0) {
    throw std::invalid_argument("min_rank_montecarlo: need m > 0, 1 <= r <= m, m_tilde <= m, trials > 0");
  }
  Rng rng(seed);
  // Random distinct values; rank[i] is the 0-based position of value i in sorted order.
  std::vector<double> values(m);
  for (double& v : values) v = rng.uniform01();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  std::vector<std::size_t> rank(m);
  for (std::size_t pos = 0; pos < m; ++pos) rank[order[pos]] = pos;

  const std::size_t cutoff = m - m_tilde;
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t successes = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    partial_shuffle(perm, r, rng);
    std::size_t best = m;
    for (std::size_t k = 0; k < r; ++k) best = std::min(best, rank[perm[k]]);
    if (best < cutoff) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace fwsvm
