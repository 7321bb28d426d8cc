#include "fwsvm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fwsvm/error.hpp"

namespace fwsvm {

IterateState IterateState::at_vertex(CachedKernel& kernel, std::size_t vertex, bool maintain_gradient) {
  const std::size_t m = kernel.size();
  if (vertex >= m) throw std::out_of_range("initial vertex out of range");
  IterateState s;
  s.alpha_.assign(m, 0.0);
  s.alpha_[vertex] = 1.0;
  s.support_.push_back(vertex);
  s.objective_ = 0.5 * kernel.diagonal(vertex);
  if (maintain_gradient) {
    const auto row = kernel.row(vertex);
    s.gradient_.assign(row.begin(), row.end());
  }
  return s;
}

double gradient_component(const IterateState& state, CachedKernel& kernel, std::size_t i) {
  if (i >= state.dimension()) throw std::out_of_range("gradient component index out of range");
  const auto alpha = state.alpha();
  double g = 0.0;
  for (const std::size_t j : state.support()) {
    const double* row = kernel.find(j);
    g += alpha[j] * (row != nullptr ? row[i] : kernel.entry(j, i));
  }
  return g;
}

void gradient_components(const IterateState& state, CachedKernel& kernel,
                         std::span<const std::size_t> indices, std::span<double> out) {
  if (out.size() != indices.size()) throw std::invalid_argument("gradient_components: size mismatch");
  for (const std::size_t i : indices) {
    if (i >= state.dimension()) throw std::out_of_range("gradient component index out of range");
  }
  const auto alpha = state.alpha();
  const auto& support = state.support();
  std::vector<double> weights(support.size());
  for (std::size_t t = 0; t < support.size(); ++t) weights[t] = alpha[support[t]];

  // Indices whose own row is resident are summed along that row; the rest
  // are accumulated column-wise over the support rows. K is symmetric bit
  // for bit and both paths add in support order, so results agree exactly.
  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double* row = kernel.contains(indices[k]) ? kernel.find(indices[k]) : nullptr;
    if (row == nullptr) {
      pending.push_back(k);
      out[k] = 0.0;
      continue;
    }
    double g = 0.0;
    for (std::size_t t = 0; t < support.size(); ++t) g += weights[t] * row[support[t]];
    out[k] = g;
  }
  if (pending.empty()) return;
  for (std::size_t t = 0; t < support.size(); ++t) {
    const std::size_t j = support[t];
    const double a = weights[t];
    if (const double* row = kernel.find(j); row != nullptr) {
      for (const std::size_t k : pending) out[k] += a * row[indices[k]];
    } else {
      for (const std::size_t k : pending) out[k] += a * kernel.entry(j, indices[k]);
    }
  }
}

void SupportColumns::clear() {
  columns_.clear();
  for (auto& r : by_row_) r.clear();
}

bool SupportColumns::sync(const IterateState& state, CachedKernel& kernel) {
  const auto& support = state.support();
  if (support.size() > max_columns_) {
    if (!columns_.empty()) clear();
    return false;
  }
  // The support only grows by appending, except when a full step collapses
  // it to one index; a changed prefix means the latter.
  if (support.size() < columns_.size() ||
      (!columns_.empty() && support[columns_.size() - 1] != columns_.back()) ||
      (!columns_.empty() && support.front() != columns_.front())) {
    clear();
  }
  if (by_row_.size() != state.dimension()) by_row_.assign(state.dimension(), {});
  for (std::size_t t = columns_.size(); t < support.size(); ++t) {
    const auto row = kernel.row(support[t]);
    for (std::size_t i = 0; i < row.size(); ++i) by_row_[i].push_back(row[i]);
    columns_.push_back(support[t]);
  }
  return true;
}

void SupportColumns::components(const IterateState& state, std::span<const std::size_t> indices,
                                std::span<double> out) const {
  const auto& support = state.support();
  if (support.size() != columns_.size()) throw std::logic_error("SupportColumns used without sync");
  if (out.size() != indices.size()) throw std::invalid_argument("components: size mismatch");
  const auto alpha = state.alpha();
  std::vector<double> weights(support.size());
  for (std::size_t t = 0; t < support.size(); ++t) weights[t] = alpha[support[t]];
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double* col = by_row_.at(indices[k]).data();
    double g = 0.0;
    for (std::size_t t = 0; t < weights.size(); ++t) g += weights[t] * col[t];
    out[k] = g;
  }
}

double fw_step(IterateState& state, std::size_t vertex, double vertex_gradient, CachedKernel& kernel) {
  const std::size_t m = state.dimension();
  if (vertex >= m) throw std::out_of_range("FW vertex out of range");

  const double f = state.objective_;
  const double kii = kernel.diagonal(vertex);
  if (!std::isfinite(vertex_gradient)) {
    throw NumericalError("non-finite gradient component in line search at iteration " +
                         std::to_string(state.iteration_));
  }
  const double numerator = 2.0 * f - vertex_gradient;
  double lambda = 0.0;
  const bool already_there = state.support_.size() == 1 && state.support_.front() == vertex;
  if (numerator > 0.0 && !already_there) {
    // Curvature d'Kd along d = e_vertex - alpha.
    const double denominator = kii - 2.0 * vertex_gradient + 2.0 * f;
    if (!(denominator > 0.0) || !std::isfinite(denominator)) {
      throw NumericalError("non-positive curvature " + std::to_string(denominator) +
                           " in line search at iteration " + std::to_string(state.iteration_));
    }
    lambda = std::min(1.0, numerator / denominator);
  }

  if (lambda >= 1.0) {
    for (const std::size_t j : state.support_) state.alpha_[j] = 0.0;
    state.alpha_[vertex] = 1.0;
    state.support_.assign(1, vertex);
    state.objective_ = 0.5 * kii;
    if (state.has_gradient()) {
      const auto row = kernel.row(vertex);
      std::copy(row.begin(), row.end(), state.gradient_.begin());
    }
  } else if (lambda > 0.0) {
    const double keep = 1.0 - lambda;
    const bool is_new = state.alpha_[vertex] == 0.0;
    for (const std::size_t j : state.support_) state.alpha_[j] *= keep;
    state.alpha_[vertex] += lambda;
    if (is_new) state.support_.push_back(vertex);
    state.objective_ = f + lambda * (vertex_gradient - 2.0 * f) +
                       0.5 * lambda * lambda * (kii - 2.0 * vertex_gradient + 2.0 * f);
    if (state.has_gradient()) {
      const auto row = kernel.row(vertex);
      double* g = state.gradient_.data();
      for (std::size_t i = 0; i < m; ++i) g[i] = keep * g[i] + lambda * row[i];
    }
  }
  ++state.iteration_;
  return lambda;
}

double fw_step(IterateState& state, std::size_t vertex, CachedKernel& kernel) {
  if (vertex >= state.dimension()) throw std::out_of_range("FW vertex out of range");
  const double g = state.has_gradient() ? state.gradient()[vertex]
                                        : gradient_component(state, kernel, vertex);
  return fw_step(state, vertex, g, kernel);
}

double exact_gap(const IterateState& state, CachedKernel& kernel) {
  double min_g = 0.0;
  if (state.has_gradient()) {
    const auto g = state.gradient();
    min_g = *std::min_element(g.begin(), g.end());
  } else {
    std::vector<std::size_t> all(state.dimension());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<double> g(all.size());
    gradient_components(state, kernel, all, g);
    min_g = *std::min_element(g.begin(), g.end());
  }
  return 2.0 * state.objective() - min_g;
}

namespace {

void require_simplex(std::span<const double> alpha, std::size_t m) {
  if (alpha.size() != m) throw std::invalid_argument("alpha has wrong length");
  double sum = 0.0;
  for (const double a : alpha) {
    if (!(a >= 0.0)) throw std::invalid_argument("alpha has a negative or NaN coordinate");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("alpha does not sum to 1");
}

}  // namespace

double objective_bruteforce(std::span<const double> alpha, const KernelMatrix& kernel) {
  require_simplex(alpha, kernel.size());
  double f = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      f += alpha[i] * kernel.entry(i, j) * alpha[j];
    }
  }
  return 0.5 * f;
}

std::vector<double> gradient_bruteforce(std::span<const double> alpha, const KernelMatrix& kernel) {
  require_simplex(alpha, kernel.size());
  std::vector<double> g(alpha.size(), 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] == 0.0) continue;
    for (std::size_t i = 0; i < alpha.size(); ++i) g[i] += kernel.entry(i, j) * alpha[j];
  }
  return g;
}

ResyncReport resync(IterateState& state, const KernelMatrix& kernel) {
  ResyncReport report;
  const double f = objective_bruteforce(state.alpha_, kernel);
  report.objective_rel_error = std::abs(state.objective_ - f) / std::max(std::abs(f), 1e-300);
  state.objective_ = f;
  if (state.has_gradient()) {
    const auto g = gradient_bruteforce(state.alpha_, kernel);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      diff = std::max(diff, std::abs(state.gradient_[i] - g[i]));
      scale = std::max(scale, std::abs(g[i]));
    }
    report.gradient_rel_error = diff / std::max(scale, 1e-300);
    state.gradient_ = g;
  }
  return report;
}

}  // namespace fwsvm
