#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fwsvm/dataset.hpp"
#include "fwsvm/kernel.hpp"
#include "fwsvm/problem.hpp"

namespace fwsvm {

struct SupportVector {
  std::size_t index = 0;  // 0-based training row
  double alpha = 0.0;
  int label = 1;
  SparseRow x;

  friend bool operator==(const SupportVector&, const SupportVector&) = default;
};

// Trained predictor. Keeps its own copy of the support rows so it outlives
// the training set and serializes self-contained.
//
// Decision value: sum_j alpha_j y_j (k(x_j, x) + 1) for the effective kernel;
// the +1 is the bias folded into that kernel. In raw-gaussian mode the +1 is
// dropped. Zero maps to +1.
class SvmModel {
 public:
  SvmModel(KernelSpec spec, std::vector<SupportVector> support);

  // Positive coordinates of `state`, in ascending training-index order.
  static SvmModel from_iterate(const SparseDataset& train, const KernelSpec& spec,
                               const IterateState& state);

  const KernelSpec& spec() const noexcept { return spec_; }
  const std::vector<SupportVector>& support() const noexcept { return support_; }
  std::size_t support_count() const noexcept { return support_.size(); }

  double decision_value(const SparseRow& x) const;
  int predict(const SparseRow& x) const { return decision_value(x) >= 0.0 ? 1 : -1; }

  // Text layout:
  //   fwsvm-model 1
  //   kernel <mode> gamma <g> c <c>
  //   support <n>
  //   <index> <alpha> <label> [idx:val ...]     (n lines, index 1-based)
  void save(std::ostream& out) const;
  static SvmModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static SvmModel load_file(const std::string& path);

  friend bool operator==(const SvmModel& a, const SvmModel& b) {
    return a.spec_.gamma == b.spec_.gamma && a.spec_.c == b.spec_.c &&
           a.spec_.mode == b.spec_.mode && a.support_ == b.support_;
  }

 private:
  KernelSpec spec_;
  std::vector<SupportVector> support_;
};

// Fraction of rows whose prediction matches the label. Throws
// std::invalid_argument on an empty set.
double evaluate(const SvmModel& model, const SparseDataset& test);

}  // namespace fwsvm
