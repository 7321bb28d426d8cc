#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fwsvm {

// One sparse feature vector. Indices are 0-based and strictly ascending.
struct SparseRow {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return indices.size(); }
  double squared_norm() const noexcept;

  friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

// Throws std::invalid_argument unless indices ascend strictly and values are finite.
void validate_row(const SparseRow& row);

// Immutable labeled dataset; labels are exactly +1 or -1.
class SparseDataset {
 public:
  SparseDataset(std::vector<SparseRow> rows, std::vector<int> labels);

  std::size_t size() const noexcept { return rows_.size(); }
  // 1 + largest 0-based feature index over all rows (0 when every row is empty).
  std::size_t dim() const noexcept { return dim_; }

  const SparseRow& row(std::size_t i) const { return rows_.at(i); }
  int label(std::size_t i) const { return labels_.at(i); }
  const std::vector<SparseRow>& rows() const noexcept { return rows_; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::vector<SparseRow> rows_;
  std::vector<int> labels_;
  std::size_t dim_ = 0;
};

struct ParseOptions {
  // Accept labels {0,1} and map 0 -> -1. Off by default so unexpected label
  // alphabets fail loudly.
  bool remap_zero_one = false;
};

// Reads LIBSVM/SVMlight text: "<label> <index>:<value> ..." per line, 1-based
// strictly ascending indices. Blank lines are skipped; '#' comments and
// qid tokens are rejected. Throws ParseError carrying the 1-based line number.
SparseDataset parse_libsvm(std::istream& in, const ParseOptions& options = {});
SparseDataset parse_libsvm_string(const std::string& text, const ParseOptions& options = {});

// Throws IoError when the file cannot be opened.
SparseDataset load_libsvm(const std::string& path, const ParseOptions& options = {});

// Writes shortest round-trip representations; labels as "+1"/"-1", 1-based indices.
void write_libsvm(std::ostream& out, const SparseDataset& ds);
void write_row_features(std::ostream& out, const SparseRow& row);

// Uniform subset of n rows chosen by `seed`, kept in original order.
SparseDataset subsample(const SparseDataset& ds, std::size_t n, std::uint64_t seed);

// Parses one "idx:val idx:val ..." tail into a row. Used by the model reader too.
SparseRow parse_features(const std::string& text, std::size_t line_number);

}  // namespace fwsvm
