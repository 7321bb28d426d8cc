// fwsvm: train, benchmark and inspect Frank-Wolfe L2-SVM solvers.
//
// Exit codes: 0 success (including max-iters exhaustion), 1 usage/config
// error, 2 I/O or data-format error, 3 numerical error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fwsvm/bench.hpp"
#include "fwsvm/dataset.hpp"
#include "fwsvm/error.hpp"
#include "fwsvm/model.hpp"
#include "fwsvm/solver.hpp"
#include "fwsvm/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fwsvm;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

// Flags shared by train and benchmark; applied on top of an optional config.
struct CommonFlags {
  std::string config;
  std::string data, test;
  std::string gamma;  // number or "auto" (1/dim)
  double c = 0.0;
  std::string kernel_mode;
  double epsilon = 1e-4;
  std::size_t max_iters = 0, patience = 0, exact_gap_every = 0, resync_every = 0;
  std::size_t cache_rows = 0, cache_bytes = 0;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool remap = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON plan/config file; flags override its fields");
  cmd->add_option("--data", f.data, "training set (LIBSVM format)");
  cmd->add_option("--test", f.test, "test set (LIBSVM format)");
  cmd->add_option("--gamma", f.gamma, "Gaussian width, or 'auto' for 1/dim");
  cmd->add_option("--c", f.c, "L2-SVM regularization C");
  cmd->add_option("--kernel-mode", f.kernel_mode, "l2svm-effective (default) or raw-gaussian");
  cmd->add_option("--epsilon", f.epsilon, "stopping tolerance on the gap")->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "iteration cap (default 1000000)");
  cmd->add_option("--patience", f.patience, "consecutive below-epsilon iterations to stop (default 1)");
  cmd->add_option("--exact-gap-every", f.exact_gap_every, "exact-gap diagnostic period in sampled mode");
  cmd->add_option("--resync-every", f.resync_every, "dense recomputation period for maintained values");
  cmd->add_option("--cache-rows", f.cache_rows, "kernel cache capacity in rows (default 1024)");
  cmd->add_option("--cache-bytes", f.cache_bytes, "optional kernel cache byte budget");
  cmd->add_option("--seed", f.seed, "run seed (base seed for benchmark)")->capture_default_str();
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_flag("--remap-01", f.remap, "accept {0,1} labels, mapping 0 to -1");
}

BenchPlan build_plan(CLI::App* cmd, const CommonFlags& f) {
  BenchPlan p = f.config.empty() ? BenchPlan{} : load_plan(f.config);
  auto given = [&](const char* name) { return cmd->get_option(name)->count() > 0; };
  if (given("--data")) p.train_path = f.data;
  if (given("--test")) p.test_path = f.test;
  if (given("--c")) p.kernel.c = f.c;
  if (given("--kernel-mode")) p.kernel.mode = kernel_mode_from_string(f.kernel_mode);
  if (given("--epsilon") || f.config.empty()) p.epsilon = f.epsilon;
  if (given("--max-iters")) p.max_iters = f.max_iters;
  if (given("--patience")) p.patience = f.patience;
  if (given("--exact-gap-every")) p.exact_gap_every = f.exact_gap_every;
  if (given("--resync-every")) p.resync_every = f.resync_every;
  if (given("--cache-rows")) p.cache.rows = f.cache_rows;
  if (given("--cache-bytes")) p.cache.byte_budget = f.cache_bytes;
  if (given("--seed") || f.config.empty()) p.base_seed = f.seed;
  if (given("--out-dir")) p.out_dir = f.out_dir;
  if (f.remap) p.remap_zero_one = true;
  if (given("--gamma") && f.gamma != "auto") {
    try {
      std::size_t pos = 0;
      p.kernel.gamma = std::stod(f.gamma, &pos);
      if (pos != f.gamma.size()) throw std::invalid_argument(f.gamma);
    } catch (const std::exception&) {
      throw ConfigError("--gamma expects a number or 'auto'");
    }
  }
  if (p.train_path.empty()) throw ConfigError("--data (or 'train' in the config) is required");
  return p;
}

// gamma 'auto' needs the data dimension, so it is resolved after loading.
void resolve_gamma(BenchPlan& p, const CommonFlags& f, const SparseDataset& train) {
  if (f.gamma == "auto") p.kernel.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(train.dim(), 1));
  if (!(p.kernel.gamma > 0.0)) throw ConfigError("--gamma is required (a positive number or 'auto')");
  if (p.kernel.mode == KernelMode::l2svm_effective && !(p.kernel.c > 0.0)) {
    throw ConfigError("--c is required and must be positive");
  }
}

void print_summary(std::ostream& out, const RunSummary& s, double accuracy, bool has_test) {
  out << std::setprecision(8);
  out << "termination        " << to_string(s.termination) << '\n'
      << "m                  " << s.m << '\n'
      << "strategy           " << (s.sample_size == 0 ? "full" : "random |S|=" + std::to_string(s.sample_size)) << '\n'
      << "iterations         " << s.iterations << '\n'
      << "support vectors    " << s.support_vectors << '\n'
      << "mean |I|           " << s.mean_support_size << '\n'
      << "final gap          " << s.final_gap << '\n'
      << "final exact gap    " << s.final_exact_gap << '\n'
      << "objective          " << s.final_objective << '\n'
      << "solve time (s)     " << s.timings.solve_seconds << '\n'
      << "diag time (s)      " << s.timings.diagnostic_seconds << '\n'
      << "cache hits/misses  " << s.cache.hits << '/' << s.cache.misses << " (evictions "
      << s.cache.evictions << ")\n";
  if (s.sample_size > 0) {
    out << "|S| < m/mean|I|    " << (s.sampling_advisable ? "yes" : "no") << '\n';
  }
  if (has_test) out << "test accuracy (%)  " << 100.0 * accuracy << '\n';
}

int cmd_train(CLI::App* cmd, const CommonFlags& f, std::size_t sample_size, bool trace_timing) {
  BenchPlan p = build_plan(cmd, f);
  ParseOptions opts;
  opts.remap_zero_one = p.remap_zero_one;
  SparseDataset train = load_libsvm(p.train_path, opts);
  if (p.train_subsample > 0) train = subsample(train, p.train_subsample, p.subsample_seed);
  resolve_gamma(p, f, train);

  if (cmd->get_option("--sample-size")->count() == 0 && !f.config.empty()) {
    sample_size = p.sample_sizes.front();
  }
  SolverConfig cfg;
  cfg.strategy.kind = sample_size == 0 ? StrategyKind::full : StrategyKind::random;
  cfg.strategy.sample_size = sample_size;
  cfg.strategy.seed = p.base_seed;
  cfg.seed = p.base_seed;
  cfg.epsilon = p.epsilon;
  cfg.max_iters = p.max_iters;
  cfg.patience = p.patience;
  cfg.exact_gap_every = p.exact_gap_every;
  cfg.resync_every = p.resync_every;
  cfg.cache = p.cache;

  SolveResult res = solve(train, p.kernel, cfg);
  double accuracy = 0.0;
  const bool has_test = !p.test_path.empty();
  if (has_test) accuracy = evaluate(res.model, load_libsvm(p.test_path, opts));
  print_summary(std::cout, res.summary, accuracy, has_test);

  const fs::path out_dir = p.out_dir.empty() ? fs::path(".") : fs::path(p.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  res.model.save_file((out_dir / "model.txt").string());
  std::ofstream trace(out_dir / "trace.csv");
  if (!trace) throw IoError("cannot write '" + (out_dir / "trace.csv").string() + "'");
  write_trace_csv(trace, res.trace, trace_timing);
  std::cout << "wrote " << (out_dir / "model.txt").string() << " and " << (out_dir / "trace.csv").string()
            << '\n';
  return kOk;
}

int cmd_benchmark(CLI::App* cmd, const CommonFlags& f, const std::vector<std::string>& sizes,
                  std::size_t reps, std::size_t jobs) {
  BenchPlan p = build_plan(cmd, f);
  if (!sizes.empty()) {
    p.sample_sizes.clear();
    for (const auto& s : sizes) {
      if (s == "full" || s == "0") {
        p.sample_sizes.push_back(0);
      } else {
        try {
          p.sample_sizes.push_back(std::stoul(s));
        } catch (const std::exception&) {
          throw ConfigError("bad sampling size '" + s + "'");
        }
      }
    }
  }
  if (cmd->get_option("--reps")->count() > 0) p.repetitions = reps;
  if (cmd->get_option("--jobs")->count() > 0) p.jobs = jobs;
  if (p.out_dir.empty()) p.out_dir = "bench_out";
  if (f.gamma == "auto") {
    ParseOptions opts;
    opts.remap_zero_one = p.remap_zero_one;
    resolve_gamma(p, f, load_libsvm(p.train_path, opts));
  }

  const BenchReport report = run_benchmark(p);
  write_summary_csv(std::cout, report);
  std::cout << "wrote " << p.out_dir << "/{summary.csv,runs.csv,gaps.csv,traces/}\n";
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& test_path, const std::string& out_path,
                bool remap) {
  const SvmModel model = SvmModel::load_file(model_path);
  ParseOptions opts;
  opts.remap_zero_one = remap;
  const SparseDataset test = load_libsvm(test_path, opts);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write '" + out_path + "'");
    for (const auto& row : test.rows()) out << (model.predict(row) > 0 ? "+1" : "-1") << '\n';
  }
  std::cout << "support vectors    " << model.support_count() << '\n'
            << "test points        " << test.size() << '\n'
            << "test accuracy (%)  " << std::setprecision(8) << 100.0 * evaluate(model, test) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe L2-SVM solver and benchmark harness"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  std::size_t sample_size = 0;
  bool trace_timing = false;
  auto* train = app.add_subcommand("train", "single solve; prints a summary, writes model.txt and trace.csv");
  add_common(train, train_flags);
  train->add_option("--sample-size", sample_size, "working-set size |S| (0 = full scan)")->capture_default_str();
  train->add_flag("--trace-timing", trace_timing, "append per-iteration wall-clock to trace.csv");

  CommonFlags bench_flags;
  std::vector<std::string> sizes;
  std::size_t reps = 10, jobs = 1;
  auto* bench = app.add_subcommand("benchmark", "run a plan over sampling sizes and seeds");
  add_common(bench, bench_flags);
  bench->add_option("--sizes", sizes, "sampling sizes, e.g. full 500 250 125")->delimiter(',');
  bench->add_option("--sample-size", sizes, "alias of --sizes");
  bench->add_option("--reps", reps, "repetitions per sampling size")->capture_default_str();
  bench->add_option("--jobs", jobs, "parallel runs (results independent of this)")->capture_default_str();

  std::size_t vm = 1000, vm_tilde = 950, vr = 60, vtrials = 10000;
  std::uint64_t vseed = 1;
  auto* verify = app.add_subcommand("verify-sampling", "compare the min-rank bound with Monte-Carlo");
  verify->add_option("--m", vm, "population size")->capture_default_str();
  verify->add_option("--m-tilde", vm_tilde, "rank threshold")->capture_default_str();
  verify->add_option("--r", vr, "sample size")->capture_default_str();
  verify->add_option("--trials", vtrials, "Monte-Carlo trials")->capture_default_str();
  verify->add_option("--seed", vseed, "seed")->capture_default_str();

  std::string model_path, test_path, pred_out;
  bool pred_remap = false;
  auto* predict = app.add_subcommand("predict", "evaluate a saved model on a test set");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--test", test_path, "test set (LIBSVM format)")->required();
  predict->add_option("--out", pred_out, "write one predicted label per line");
  predict->add_flag("--remap-01", pred_remap, "accept {0,1} labels");

  std::string synth_kind = "census", synth_out;
  std::size_t synth_m = 2000, synth_dim = 2;
  double synth_sep = 3.0;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset in LIBSVM format");
  synth->add_option("--kind", synth_kind, "census or clusters")->capture_default_str();
  synth->add_option("--m", synth_m, "rows")->capture_default_str();
  synth->add_option("--dim", synth_dim, "dimensions (clusters)")->capture_default_str();
  synth->add_option("--separation", synth_sep, "class separation (clusters)")->capture_default_str();
  synth->add_option("--seed", synth_seed, "sample seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(train, train_flags, sample_size, trace_timing);
    if (*bench) return cmd_benchmark(bench, bench_flags, sizes, reps, jobs);
    if (*verify) {
      const SamplingReport rep = verify_sampling(vm, vm_tilde, vr, vtrials, vseed);
      print_sampling_report(std::cout, rep);
      return kOk;
    }
    if (*predict) return cmd_predict(model_path, test_path, pred_out, pred_remap);
    if (*synth) {
      SparseDataset ds = synth_kind == "census" ? make_census_like(synth_m, synth_seed)
                         : synth_kind == "clusters"
                             ? make_two_clusters(synth_m, synth_dim, synth_sep, synth_seed)
                             : throw ConfigError("unknown synthetic kind '" + synth_kind + "'");
      std::ofstream out(synth_out);
      if (!out) throw IoError("cannot write '" + synth_out + "'");
      write_libsvm(out, ds);
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
