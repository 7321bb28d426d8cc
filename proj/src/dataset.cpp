#include "fwsvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "fwsvm/error.hpp"
#include "fwsvm/rng.hpp"

namespace fwsvm {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

double parse_double(std::string_view token, std::size_t line, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry.
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size()) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, std::string("non-finite ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

SparseRow parse_feature_tokens(std::span<const std::string_view> tokens, std::size_t line) {
  SparseRow row;
  row.indices.reserve(tokens.size());
  row.values.reserve(tokens.size());
  for (const std::string_view tok : tokens) {
    if (tok.front() == '#') throw ParseError(line, "comments are not supported");
    const std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos || colon == 0) {
      throw ParseError(line, "expected index:value, got '" + std::string(tok) + "'");
    }
    const std::string_view idx_text = tok.substr(0, colon);
    std::uint64_t index = 0;
    const auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
      throw ParseError(line, "non-numeric index '" + std::string(idx_text) + "'");
    }
    if (index == 0) throw ParseError(line, "feature indices are 1-based");
    if (index > std::numeric_limits<std::uint32_t>::max()) {
      throw ParseError(line, "feature index too large");
    }
    const auto zero_based = static_cast<std::uint32_t>(index - 1);
    if (!row.indices.empty() && zero_based <= row.indices.back()) {
      throw ParseError(line, "feature indices must be strictly ascending");
    }
    row.indices.push_back(zero_based);
    row.values.push_back(parse_double(tok.substr(colon + 1), line, "value"));
  }
  return row;
}

}  // namespace

double SparseRow::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

void validate_row(const SparseRow& row) {
  if (row.indices.size() != row.values.size()) {
    throw std::invalid_argument("sparse row: index/value length mismatch");
  }
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    if (k > 0 && row.indices[k] <= row.indices[k - 1]) {
      throw std::invalid_argument("sparse row: indices not strictly ascending");
    }
    if (!std::isfinite(row.values[k])) throw std::invalid_argument("sparse row: non-finite value");
  }
}

SparseDataset::SparseDataset(std::vector<SparseRow> rows, std::vector<int> labels)
    : rows_(std::move(rows)), labels_(std::move(labels)) {
  if (rows_.size() != labels_.size()) {
    throw std::invalid_argument("dataset: row and label counts differ");
  }
  for (const int y : labels_) {
    if (y != 1 && y != -1) throw std::invalid_argument("dataset: labels must be +1 or -1");
  }
  for (const SparseRow& r : rows_) {
    validate_row(r);
    if (!r.indices.empty()) dim_ = std::max<std::size_t>(dim_, r.indices.back() + 1);
  }
}

SparseRow parse_features(const std::string& text, std::size_t line_number) {
  const auto tokens = split_tokens(text);
  return parse_feature_tokens(tokens, line_number);
}

SparseDataset parse_libsvm(std::istream& in, const ParseOptions& options) {
  std::vector<SparseRow> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.front().front() == '#') throw ParseError(line_number, "comments are not supported");

    const double raw = parse_double(tokens.front(), line_number, "label");
    int label = 0;
    if (raw == 1.0) {
      label = 1;
    } else if (raw == -1.0) {
      label = -1;
    } else if (raw == 0.0 && options.remap_zero_one) {
      label = -1;
    } else {
      throw ParseError(line_number, "unsupported label '" + std::string(tokens.front()) +
                                        "' (expected +1/-1" +
                                        (options.remap_zero_one ? " or 0/1)" : ")"));
    }
    rows.push_back(parse_feature_tokens(std::span(tokens).subspan(1), line_number));
    labels.push_back(label);
  }
  if (in.bad()) throw IoError("read failure while parsing dataset");
  if (rows.empty()) throw ParseError(0, "empty dataset");
  return SparseDataset(std::move(rows), std::move(labels));
}

SparseDataset parse_libsvm_string(const std::string& text, const ParseOptions& options) {
  std::istringstream in(text);
  return parse_libsvm(in, options);
}

SparseDataset load_libsvm(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  try {
    return parse_libsvm(in, options);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + std::string(e.what()));
  }
}

void write_row_features(std::ostream& out, const SparseRow& row) {
  char buf[64];
  for (std::size_t k = 0; k < row.nnz(); ++k) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), row.values[k]);
    if (k > 0) out << ' ';
    out << (row.indices[k] + 1) << ':' << std::string_view(buf, res.ptr - buf);
  }
}

void write_libsvm(std::ostream& out, const SparseDataset& ds) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << (ds.label(i) > 0 ? "+1" : "-1");
    if (ds.row(i).nnz() > 0) {
      out << ' ';
      write_row_features(out, ds.row(i));
    }
    out << '\n';
  }
}

SparseDataset subsample(const SparseDataset& ds, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > ds.size()) {
    throw std::out_of_range("subsample: n must lie in [1, " + std::to_string(ds.size()) + "]");
  }
  std::vector<std::size_t> perm(ds.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  partial_shuffle(perm, n, rng);
  perm.resize(n);
  std::sort(perm.begin(), perm.end());

  std::vector<SparseRow> rows;
  std::vector<int> labels;
  rows.reserve(n);
  labels.reserve(n);
  for (const std::size_t i : perm) {
    rows.push_back(ds.row(i));
    labels.push_back(ds.label(i));
  }
  return SparseDataset(std::move(rows), std::move(labels));
}

}  // namespace fwsvm
