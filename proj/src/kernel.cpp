#include "fwsvm/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "fwsvm/error.hpp"

namespace fwsvm {

std::string to_string(KernelMode mode) {
  return mode == KernelMode::raw_gaussian ? "raw-gaussian" : "l2svm-effective";
}

KernelMode kernel_mode_from_string(const std::string& name) {
  if (name == "raw-gaussian") return KernelMode::raw_gaussian;
  if (name == "l2svm-effective") return KernelMode::l2svm_effective;
  throw ConfigError("unknown kernel mode '" + name + "' (expected raw-gaussian or l2svm-effective)");
}

void KernelSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("kernel gamma must be > 0");
  if (mode == KernelMode::l2svm_effective && (!(c > 0.0) || !std::isfinite(c))) {
    throw ConfigError("kernel C must be > 0");
  }
}

double squared_distance(const SparseRow& x, const SparseRow& z) noexcept {
  double s = 0.0;
  std::size_t a = 0, b = 0;
  const std::size_t na = x.nnz(), nb = z.nnz();
  while (a < na && b < nb) {
    if (x.indices[a] == z.indices[b]) {
      const double d = x.values[a++] - z.values[b++];
      s += d * d;
    } else if (x.indices[a] < z.indices[b]) {
      s += x.values[a] * x.values[a];
      ++a;
    } else {
      s += z.values[b] * z.values[b];
      ++b;
    }
  }
  for (; a < na; ++a) s += x.values[a] * x.values[a];
  for (; b < nb; ++b) s += z.values[b] * z.values[b];
  return s;
}

// The merge above visits coordinates in ascending index order whichever
// argument comes first, and (x-z)^2 == (z-x)^2 exactly, so the result is
// symmetric bit for bit.
double gaussian(const SparseRow& x, const SparseRow& z, double gamma) noexcept {
  return std::exp(-gamma * squared_distance(x, z));
}

KernelMatrix::KernelMatrix(const SparseDataset& ds, const KernelSpec& spec)
    : ds_(&ds), spec_(spec), inv_c_(0.0) {
  spec_.validate();
  if (spec_.mode == KernelMode::l2svm_effective) inv_c_ = 1.0 / spec_.c;
}

double KernelMatrix::entry_unchecked(std::size_t i, std::size_t j) const noexcept {
  ++evaluations_;
  const double k = i == j ? 1.0 : gaussian(ds_->rows()[i], ds_->rows()[j], spec_.gamma);
  if (spec_.mode == KernelMode::raw_gaussian) return k;
  const double yy = static_cast<double>(ds_->labels()[i] * ds_->labels()[j]);
  return yy * (k + 1.0) + (i == j ? inv_c_ : 0.0);
}

double KernelMatrix::entry(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw std::out_of_range("kernel entry index out of range");
  return entry_unchecked(i, j);
}

double KernelMatrix::diagonal(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("kernel diagonal index out of range");
  return spec_.mode == KernelMode::raw_gaussian ? 1.0 : 2.0 + inv_c_;
}

void KernelMatrix::compute_row(std::size_t i, std::span<double> out) const {
  if (i >= size()) throw std::out_of_range("kernel row index out of range");
  if (out.size() != size()) throw std::invalid_argument("kernel row buffer has wrong length");
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = entry_unchecked(i, j);
}

double effective_entry(const SparseDataset& ds, const KernelSpec& spec, std::size_t i, std::size_t j) {
  return KernelMatrix(ds, spec).entry(i, j);
}

std::size_t CacheConfig::capacity_for(std::size_t m) const noexcept {
  std::size_t cap = rows;
  if (byte_budget > 0 && m > 0) {
    const std::size_t by_bytes = byte_budget / (m * sizeof(double));
    if (by_bytes < cap) cap = by_bytes;
  }
  return cap < m ? cap : m;
}

CachedKernel::CachedKernel(const SparseDataset& ds, const KernelSpec& spec, CacheConfig config)
    : matrix_(ds, spec), capacity_(config.capacity_for(ds.size())) {
  index_.reserve(capacity_);
}

std::span<const double> CachedKernel::row(std::size_t i) {
  if (i >= size()) throw std::out_of_range("kernel row index out of range");
  if (auto it = index_.find(i); it != index_.end()) {
    ++stats_.hits;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->values;
  }
  ++stats_.misses;
  if (capacity_ == 0) {
    scratch_.resize(size());
    matrix_.compute_row(i, scratch_);
    return scratch_;
  }
  if (index_.size() >= capacity_) {
    // Reuse the evicted slot's buffer.
    auto victim = std::prev(lru_.end());
    index_.erase(victim->key);
    ++stats_.evictions;
    victim->key = i;
    lru_.splice(lru_.begin(), lru_, victim);
  } else {
    lru_.push_front(Slot{i, std::vector<double>(size())});
  }
  matrix_.compute_row(i, lru_.front().values);
  index_.emplace(i, lru_.begin());
  return lru_.front().values;
}

const double* CachedKernel::find(std::size_t i) {
  if (auto it = index_.find(i); it != index_.end()) {
    ++stats_.hits;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->values.data();
  }
  ++stats_.misses;
  return nullptr;
}

}  // namespace fwsvm
