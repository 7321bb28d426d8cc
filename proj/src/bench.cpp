#include "fwsvm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fwsvm/error.hpp"
#include "fwsvm/selection.hpp"

namespace fwsvm {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// Shortest form that round-trips.
std::string full_precision(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string sample_size_label(std::size_t sample_size) {
  return sample_size == 0 ? "full" : std::to_string(sample_size);
}

void BenchPlan::validate() const {
  if (sample_sizes.empty()) throw ConfigError("plan needs at least one sampling size");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  kernel.validate();
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

BenchPlan parse_plan(const std::string& json_text, const std::string& base_dir) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("plan must be a JSON object");

  BenchPlan p;
  auto resolve = [&](const std::string& s) {
    if (s.empty() || base_dir.empty() || fs::path(s).is_absolute()) return s;
    return (fs::path(base_dir) / s).string();
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "train") p.train_path = resolve(v.get<std::string>());
      else if (key == "test") p.test_path = resolve(v.get<std::string>());
      else if (key == "remap_zero_one") p.remap_zero_one = v.get<bool>();
      else if (key == "train_subsample") p.train_subsample = v.get<std::size_t>();
      else if (key == "test_subsample") p.test_subsample = v.get<std::size_t>();
      else if (key == "subsample_seed") p.subsample_seed = v.get<std::uint64_t>();
      else if (key == "gamma") p.kernel.gamma = v.get<double>();
      else if (key == "c") p.kernel.c = v.get<double>();
      else if (key == "kernel_mode") p.kernel.mode = kernel_mode_from_string(v.get<std::string>());
      else if (key == "sample_sizes") {
        p.sample_sizes.clear();
        for (const auto& s : v) {
          if (s.is_string()) {
            if (s.get<std::string>() != "full") throw ConfigError("sample size strings must be \"full\"");
            p.sample_sizes.push_back(0);
          } else {
            p.sample_sizes.push_back(s.get<std::size_t>());
          }
        }
      } else if (key == "repetitions") p.repetitions = v.get<std::size_t>();
      else if (key == "base_seed") p.base_seed = v.get<std::uint64_t>();
      else if (key == "epsilon") p.epsilon = v.get<double>();
      else if (key == "max_iters") p.max_iters = v.get<std::size_t>();
      else if (key == "patience") p.patience = v.get<std::size_t>();
      else if (key == "exact_gap_every") p.exact_gap_every = v.get<std::size_t>();
      else if (key == "resync_every") p.resync_every = v.get<std::size_t>();
      else if (key == "cache_rows") p.cache.rows = v.get<std::size_t>();
      else if (key == "cache_bytes") p.cache.byte_budget = v.get<std::size_t>();
      else if (key == "out_dir") p.out_dir = resolve(v.get<std::string>());
      else if (key == "write_traces") p.write_traces = v.get<bool>();
      else if (key == "jobs") p.jobs = v.get<std::size_t>();
      else if (key == "strategy") {
        // Only to surface the reserved-name error early.
        strategy_kind_from_string(v.get<std::string>());
      } else {
        throw ConfigError("unknown plan key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad plan value: ") + e.what());
  }
  return p;
}

BenchPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), fs::path(path).parent_path().string());
}

Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  if (xs.empty()) return a;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  a.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return a;
}

namespace {

RunRecord run_one(const BenchPlan& plan, const SparseDataset& train, const SparseDataset& test,
                  std::size_t sample_size, std::uint64_t seed, bool keep_trace) {
  RunRecord rec;
  rec.sample_size = sample_size;
  rec.seed = seed;
  SolverConfig cfg;
  cfg.strategy.kind = sample_size == 0 ? StrategyKind::full : StrategyKind::random;
  cfg.strategy.sample_size = sample_size;
  cfg.strategy.seed = seed;
  cfg.epsilon = plan.epsilon;
  cfg.max_iters = plan.max_iters;
  cfg.patience = plan.patience;
  cfg.exact_gap_every = plan.exact_gap_every;
  cfg.resync_every = plan.resync_every;
  cfg.seed = seed;
  cfg.cache = plan.cache;
  try {
    SolveResult res = solve(train, plan.kernel, cfg);
    rec.test_accuracy = evaluate(res.model, test);
    rec.summary = res.summary;
    if (!plan.out_dir.empty() && plan.write_traces) {
      const auto t0 = std::chrono::steady_clock::now();
      const fs::path dir = fs::path(plan.out_dir) / "traces";
      auto out = open_out(dir / ("trace_" + sample_size_label(sample_size) + "_seed" +
                                 std::to_string(seed) + ".csv"));
      write_trace_csv(out, res.trace);
      rec.io_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    if (keep_trace) rec.trace = std::move(res.trace);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

void finalize_cell(CellResult& cell) {
  std::vector<double> acc, solve_s, diag_s, io_s, iters, svs, mu;
  std::size_t advisable = 0;
  for (const auto& r : cell.runs) {
    if (!r.summary) {
      ++cell.failures;
      continue;
    }
    acc.push_back(r.test_accuracy);
    solve_s.push_back(r.summary->timings.solve_seconds);
    diag_s.push_back(r.summary->timings.diagnostic_seconds);
    io_s.push_back(r.io_seconds);
    iters.push_back(static_cast<double>(r.summary->iterations));
    svs.push_back(static_cast<double>(r.summary->support_vectors));
    mu.push_back(r.summary->mean_support_size);
    if (r.summary->sampling_advisable) ++advisable;
  }
  cell.test_accuracy = aggregate(acc);
  cell.solve_seconds = aggregate(solve_s);
  cell.diagnostic_seconds = aggregate(diag_s);
  cell.io_seconds = aggregate(io_s);
  cell.iterations = aggregate(iters);
  cell.support_vectors = aggregate(svs);
  cell.mean_support = aggregate(mu);
  cell.sampling_advisable = !acc.empty() && 2 * advisable > acc.size();
}

}  // namespace

BenchReport run_benchmark(const BenchPlan& plan, const SparseDataset& train, const SparseDataset& test) {
  plan.validate();
  for (const std::size_t s : plan.sample_sizes) {
    if (s > train.size()) {
      throw ConfigError("sample size " + std::to_string(s) + " exceeds training size " +
                        std::to_string(train.size()));
    }
  }
  if (!plan.out_dir.empty() && plan.write_traces) {
    std::error_code ec;
    fs::create_directories(fs::path(plan.out_dir) / "traces", ec);
    if (ec) throw IoError("cannot create '" + plan.out_dir + "/traces': " + ec.message());
  }

  BenchReport report;
  report.m_train = train.size();
  report.m_test = test.size();
  report.cells.resize(plan.sample_sizes.size());
  for (std::size_t c = 0; c < plan.sample_sizes.size(); ++c) {
    report.cells[c].sample_size = plan.sample_sizes[c];
    report.cells[c].runs.resize(plan.repetitions);
  }

  // Every job slot is addressed by (cell, rep), so results are placed
  // identically whatever order the workers finish in.
  const std::size_t total = plan.sample_sizes.size() * plan.repetitions;
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t c = job / plan.repetitions, rep = job % plan.repetitions;
      try {
        report.cells[c].runs[rep] =
            run_one(plan, train, test, plan.sample_sizes[c], plan.base_seed + rep, rep == 0);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (plan.jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(plan.jobs, total); ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  for (auto& cell : report.cells) finalize_cell(cell);
  return report;
}

BenchReport run_benchmark(const BenchPlan& plan) {
  plan.validate();
  if (plan.train_path.empty()) throw ConfigError("plan has no training set");
  ParseOptions opts;
  opts.remap_zero_one = plan.remap_zero_one;
  SparseDataset train = load_libsvm(plan.train_path, opts);
  SparseDataset test = plan.test_path.empty() ? train : load_libsvm(plan.test_path, opts);
  if (plan.train_subsample > 0) train = subsample(train, plan.train_subsample, plan.subsample_seed);
  if (plan.test_subsample > 0) {
    test = subsample(test, plan.test_subsample, derive_seed(plan.subsample_seed, 1));
  }

  BenchReport report = run_benchmark(plan, train, test);
  if (!plan.out_dir.empty()) {
    const fs::path dir(plan.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    {
      auto out = open_out(dir / "summary.csv");
      write_summary_csv(out, report);
    }
    {
      auto out = open_out(dir / "runs.csv");
      write_runs_csv(out, report);
    }
    std::vector<LabeledTrace> traces;
    bool all_exact = true;
    for (const auto& cell : report.cells) {
      if (!cell.runs.empty() && cell.runs.front().summary) {
        const RunTrace& t = cell.runs.front().trace;
        traces.push_back({sample_size_label(cell.sample_size), &t});
        all_exact = all_exact && (t.steps.empty() || std::any_of(t.steps.begin(), t.steps.end(), [](const auto& r) {
                                    return r.gap_exact.has_value();
                                  }));
      }
    }
    auto out = open_out(dir / "gaps.csv");
    emit_gap_figure_data(out, traces, all_exact ? GapSeries::both : GapSeries::approx);
  }
  return report;
}

void write_summary_csv(std::ostream& out, const BenchReport& report) {
  out << "sample_size,m_train,m_test,reps,failures,seeds,"
         "test_acc_pct_mean,test_acc_pct_std,time_s_mean,time_s_std,iter_mean,iter_std,"
         "svs_mean,svs_std,mu_support_mean,sampling_advisable,diag_time_s_mean,io_time_s_mean,"
         "terminations\n";
  for (const auto& cell : report.cells) {
    std::string seeds, terms;
    std::size_t converged = 0, capped = 0;
    for (const auto& r : cell.runs) {
      if (!seeds.empty()) seeds += ' ';
      seeds += std::to_string(r.seed);
      if (r.summary) {
        (r.summary->termination == Termination::gap_converged ? converged : capped)++;
      }
    }
    terms = "gap-converged:" + std::to_string(converged) + " max-iters:" + std::to_string(capped);
    out << sample_size_label(cell.sample_size) << ',' << report.m_train << ',' << report.m_test << ','
        << cell.runs.size() << ',' << cell.failures << ',' << seeds << ','
        << num(100.0 * cell.test_accuracy.mean) << ',' << num(100.0 * cell.test_accuracy.stddev) << ','
        << num(cell.solve_seconds.mean) << ',' << num(cell.solve_seconds.stddev) << ','
        << num(cell.iterations.mean) << ',' << num(cell.iterations.stddev) << ','
        << num(cell.support_vectors.mean) << ',' << num(cell.support_vectors.stddev) << ','
        << num(cell.mean_support.mean) << ',' << (cell.sampling_advisable ? "true" : "false") << ','
        << num(cell.diagnostic_seconds.mean) << ',' << num(cell.io_seconds.mean) << ',' << terms << '\n';
  }
}

void write_runs_csv(std::ostream& out, const BenchReport& report) {
  out << "sample_size,seed,status,termination,test_acc_pct,time_s,diag_time_s,io_time_s,iterations,"
         "svs,mu_support,final_gap,final_exact_gap,final_objective,cache_hits,cache_misses,"
         "cache_evictions,kernel_evals,error\n";
  for (const auto& cell : report.cells) {
    for (const auto& r : cell.runs) {
      out << sample_size_label(r.sample_size) << ',' << r.seed << ',';
      if (!r.summary) {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        out << "error,,,,,,,,,,,,,,,," << msg << '\n';
        continue;
      }
      const RunSummary& s = *r.summary;
      out << "ok," << to_string(s.termination) << ',' << num(100.0 * r.test_accuracy) << ','
          << num(s.timings.solve_seconds) << ',' << num(s.timings.diagnostic_seconds) << ','
          << num(r.io_seconds) << ',' << s.iterations << ',' << s.support_vectors << ','
          << num(s.mean_support_size) << ',' << full_precision(s.final_gap) << ','
          << full_precision(s.final_exact_gap) << ',' << full_precision(s.final_objective) << ','
          << s.cache.hits << ',' << s.cache.misses << ',' << s.cache.evictions << ','
          << s.kernel_evaluations << ",\n";
    }
  }
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, bool include_timing) {
  out << "iteration,vertex,lambda,gap_approx,gap_exact,objective,support_size";
  if (include_timing) out << ",elapsed_s";
  out << '\n';
  for (const auto& r : trace.steps) {
    out << r.iteration << ',' << (r.vertex + 1) << ',' << full_precision(r.lambda) << ','
        << full_precision(r.gap_approx) << ',';
    if (r.gap_exact) out << full_precision(*r.gap_exact);
    out << ',' << full_precision(r.objective) << ',' << r.support_size;
    if (include_timing) out << ',' << num(r.elapsed_seconds);
    out << '\n';
  }
}

void emit_gap_figure_data(std::ostream& out, const std::vector<LabeledTrace>& traces, GapSeries which) {
  const bool want_approx = which != GapSeries::exact;
  const bool want_exact = which != GapSeries::approx;
  if (want_exact) {
    for (const auto& lt : traces) {
      const bool has = std::any_of(lt.trace->steps.begin(), lt.trace->steps.end(),
                                   [](const auto& r) { return r.gap_exact.has_value(); });
      if (!has && !lt.trace->steps.empty()) {
        throw ConfigError("trace '" + lt.label +
                          "' has no exact gaps; rerun with --exact-gap-every > 0 in sampled mode");
      }
    }
  }
  out << "series,iteration,gap\n";
  for (const auto& lt : traces) {
    if (want_approx) {
      for (const auto& r : lt.trace->steps) {
        out << lt.label << ":approx," << r.iteration << ',' << full_precision(r.gap_approx) << '\n';
      }
    }
    if (want_exact) {
      for (const auto& r : lt.trace->steps) {
        if (r.gap_exact) out << lt.label << ":exact," << r.iteration << ',' << full_precision(*r.gap_exact) << '\n';
      }
    }
  }
}

SamplingReport verify_sampling(std::size_t m, std::size_t m_tilde, std::size_t r, std::size_t trials,
                               std::uint64_t seed) {
  SamplingReport rep{m, m_tilde, r, trials};
  rep.bound = min_rank_bound(m, m_tilde, r);
  rep.empirical = min_rank_montecarlo(m, m_tilde, r, trials, seed);
  rep.sigma = std::sqrt(std::max(0.0, rep.bound * (1.0 - rep.bound)) / static_cast<double>(trials));
  rep.pass = rep.empirical >= rep.bound - 3.0 * rep.sigma;
  return rep;
}

void print_sampling_report(std::ostream& out, const SamplingReport& rep) {
  out << "m=" << rep.m << " m_tilde=" << rep.m_tilde << " r=" << rep.r << " trials=" << rep.trials << '\n'
      << "analytic bound   1-(m_tilde/m)^r = " << std::setprecision(6) << rep.bound << '\n'
      << "empirical        P(min in lowest " << (rep.m - rep.m_tilde) << ") = " << rep.empirical << '\n'
      << "3-sigma slack    " << 3.0 * rep.sigma << '\n'
      << (rep.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace fwsvm
