#pragma once

#include <cstddef>
#include <list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fwsvm/dataset.hpp"

namespace fwsvm {

enum class KernelMode {
  raw_gaussian,     // K_ij = exp(-gamma ||x_i - x_j||^2)
  l2svm_effective,  // K_ij = y_i y_j (exp(-gamma ||x_i - x_j||^2) + 1) + delta_ij / C
};

std::string to_string(KernelMode mode);
KernelMode kernel_mode_from_string(const std::string& name);

struct KernelSpec {
  double gamma = 0.0;
  double c = 0.0;  // ignored in raw_gaussian mode
  KernelMode mode = KernelMode::l2svm_effective;

  // Throws ConfigError on non-positive or non-finite parameters.
  void validate() const;
};

double squared_distance(const SparseRow& x, const SparseRow& z) noexcept;

// exp(-gamma ||x - z||^2); exactly 1 for identical rows and symmetric bit for bit.
double gaussian(const SparseRow& x, const SparseRow& z, double gamma) noexcept;

// Implicit kernel matrix over a dataset. Holds references: the dataset must
// outlive it.
class KernelMatrix {
 public:
  KernelMatrix(const SparseDataset& ds, const KernelSpec& spec);

  std::size_t size() const noexcept { return ds_->size(); }
  const SparseDataset& dataset() const noexcept { return *ds_; }
  const KernelSpec& spec() const noexcept { return spec_; }

  // Throws std::out_of_range on bad indices.
  double entry(std::size_t i, std::size_t j) const;
  double diagonal(std::size_t i) const;
  void compute_row(std::size_t i, std::span<double> out) const;

  // Number of kernel evaluations performed through entry() / compute_row().
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  double entry_unchecked(std::size_t i, std::size_t j) const noexcept;

  const SparseDataset* ds_;
  KernelSpec spec_;
  double inv_c_;
  mutable std::size_t evaluations_ = 0;
};

// Convenience for effective_entry(ds, spec, i, j).
double effective_entry(const SparseDataset& ds, const KernelSpec& spec, std::size_t i, std::size_t j);

struct CacheConfig {
  std::size_t rows = 1024;
  std::size_t byte_budget = 0;  // 0: no byte limit

  // Rows that fit for a matrix of order m; the smaller of both limits.
  std::size_t capacity_for(std::size_t m) const noexcept;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t evictions = 0;

  std::size_t requests() const noexcept { return hits + misses; }
  double hit_rate() const noexcept {
    return requests() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(requests());
  }
};

// LRU cache of whole kernel rows, keyed by row index.
//
// row() always yields the row, computing and inserting it on a miss and
// evicting the least recently used row when full. find() only reports rows
// already resident (refreshing their recency) and never computes. Both count
// towards the hit/miss statistics, so hits + misses equals the number of
// requests.
//
// A span returned by row() stays valid until the next row() call. Spans from
// find() stay valid until the next row() call as well, since find() never
// evicts.
class CachedKernel {
 public:
  CachedKernel(const SparseDataset& ds, const KernelSpec& spec, CacheConfig config = {});

  std::size_t size() const noexcept { return matrix_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t resident() const noexcept { return index_.size(); }
  const KernelMatrix& matrix() const noexcept { return matrix_; }
  const CacheStats& stats() const noexcept { return stats_; }

  double entry(std::size_t i, std::size_t j) const { return matrix_.entry(i, j); }
  double diagonal(std::size_t i) const { return matrix_.diagonal(i); }

  std::span<const double> row(std::size_t i);
  const double* find(std::size_t i);
  bool contains(std::size_t i) const { return index_.contains(i); }

 private:
  struct Slot {
    std::size_t key;
    std::vector<double> values;
  };

  KernelMatrix matrix_;
  std::size_t capacity_;
  std::list<Slot> lru_;  // front = most recently used
  std::unordered_map<std::size_t, std::list<Slot>::iterator> index_;
  std::vector<double> scratch_;  // capacity 0 path
  CacheStats stats_;
};

}  // namespace fwsvm
