#include "fwsvm/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fwsvm/error.hpp"

namespace fwsvm {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double read_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw ParseError(line, "bad number '" + token + "' in model");
  }
  return v;
}

}  // namespace

SvmModel::SvmModel(KernelSpec spec, std::vector<SupportVector> support)
    : spec_(spec), support_(std::move(support)) {
  spec_.validate();
  if (support_.empty()) throw std::invalid_argument("model needs at least one support vector");
  for (const auto& sv : support_) {
    if (!(sv.alpha > 0.0)) throw std::invalid_argument("support weights must be positive");
    if (sv.label != 1 && sv.label != -1) throw std::invalid_argument("support labels must be +1 or -1");
    validate_row(sv.x);
  }
}

SvmModel SvmModel::from_iterate(const SparseDataset& train, const KernelSpec& spec,
                                const IterateState& state) {
  if (state.dimension() != train.size()) {
    throw std::invalid_argument("iterate and training set sizes differ");
  }
  std::vector<SupportVector> sv;
  sv.reserve(state.support().size());
  const auto alpha = state.alpha();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0.0) sv.push_back({i, alpha[i], train.label(i), train.row(i)});
  }
  return SvmModel(spec, std::move(sv));
}

double SvmModel::decision_value(const SparseRow& x) const {
  const double offset = spec_.mode == KernelMode::l2svm_effective ? 1.0 : 0.0;
  double s = 0.0;
  for (const auto& sv : support_) {
    s += sv.alpha * static_cast<double>(sv.label) * (gaussian(sv.x, x, spec_.gamma) + offset);
  }
  return s;
}

void SvmModel::save(std::ostream& out) const {
  out << "fwsvm-model 1\n";
  out << "kernel " << to_string(spec_.mode) << " gamma " << shortest(spec_.gamma) << " c "
      << shortest(spec_.c) << '\n';
  out << "support " << support_.size() << '\n';
  for (const auto& sv : support_) {
    out << (sv.index + 1) << ' ' << shortest(sv.alpha) << ' ' << (sv.label > 0 ? "+1" : "-1");
    if (sv.x.nnz() > 0) {
      out << ' ';
      write_row_features(out, sv.x);
    }
    out << '\n';
  }
}

SvmModel SvmModel::load(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(line_number, "truncated model file");
    ++line_number;
    return std::istringstream(line);
  };

  auto header = next_line();
  std::string magic, version;
  header >> magic >> version;
  if (magic != "fwsvm-model" || version != "1") throw ParseError(line_number, "not a fwsvm model file");

  auto kernel_line = next_line();
  std::string kw, mode, kg, gamma, kc, c;
  kernel_line >> kw >> mode >> kg >> gamma >> kc >> c;
  if (kw != "kernel" || kg != "gamma" || kc != "c") throw ParseError(line_number, "bad kernel line");
  KernelSpec spec;
  try {
    spec.mode = kernel_mode_from_string(mode);
  } catch (const ConfigError& e) {
    throw ParseError(line_number, e.what());
  }
  spec.gamma = read_double(gamma, line_number);
  spec.c = read_double(c, line_number);

  auto count_line = next_line();
  std::string ks;
  long long n = -1;
  count_line >> ks >> n;
  if (ks != "support" || n < 1) throw ParseError(line_number, "bad support count line");

  std::vector<SupportVector> sv;
  sv.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    auto ls = next_line();
    std::string idx, alpha, label;
    ls >> idx >> alpha >> label;
    std::string rest;
    std::getline(ls, rest);
    SupportVector v;
    const double index = read_double(idx, line_number);
    if (index < 1 || index != std::floor(index)) throw ParseError(line_number, "bad support index");
    v.index = static_cast<std::size_t>(index) - 1;
    v.alpha = read_double(alpha, line_number);
    if (label == "+1" || label == "1") {
      v.label = 1;
    } else if (label == "-1") {
      v.label = -1;
    } else {
      throw ParseError(line_number, "bad support label '" + label + "'");
    }
    v.x = parse_features(rest, line_number);
    sv.push_back(std::move(v));
  }
  try {
    return SvmModel(spec, std::move(sv));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("invalid model: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(0, std::string("invalid model: ") + e.what());
  }
}

void SvmModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model '" + path + "'");
  save(out);
  if (!out) throw IoError("write failure on model '" + path + "'");
}

SvmModel SvmModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path + "'");
  return load(in);
}

double evaluate(const SvmModel& model, const SparseDataset& test) {
  if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (model.predict(test.row(i)) == test.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace fwsvm
