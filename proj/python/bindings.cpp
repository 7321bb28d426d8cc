#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>

#include "fwsvm/bench.hpp"
#include "fwsvm/dataset.hpp"
#include "fwsvm/error.hpp"
#include "fwsvm/model.hpp"
#include "fwsvm/selection.hpp"
#include "fwsvm/solver.hpp"
#include "fwsvm/synthetic.hpp"

namespace py = pybind11;
using namespace fwsvm;

namespace {

SparseDataset from_dense(py::array_t<double, py::array::c_style | py::array::forcecast> x,
                         py::array_t<int, py::array::c_style | py::array::forcecast> y) {
  if (x.ndim() != 2 || y.ndim() != 1 || x.shape(0) != y.shape(0)) {
    throw std::invalid_argument("expected X of shape (m, d) and y of shape (m,)");
  }
  const auto xs = x.unchecked<2>();
  const auto ys = y.unchecked<1>();
  std::vector<SparseRow> rows(static_cast<std::size_t>(x.shape(0)));
  std::vector<int> labels(rows.size());
  for (py::ssize_t i = 0; i < x.shape(0); ++i) {
    for (py::ssize_t d = 0; d < x.shape(1); ++d) {
      if (xs(i, d) != 0.0) {
        rows[i].indices.push_back(static_cast<std::uint32_t>(d));
        rows[i].values.push_back(xs(i, d));
      }
    }
    labels[i] = ys(i);
  }
  return SparseDataset(std::move(rows), std::move(labels));
}

py::array_t<double> to_dense(const SparseDataset& ds) {
  py::array_t<double> out({ds.size(), ds.dim()});
  auto o = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t d = 0; d < ds.dim(); ++d) o(i, d) = 0.0;
    const auto& r = ds.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) o(i, r.indices[k]) = r.values[k];
  }
  return out;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["m"] = s.m;
  d["sample_size"] = s.sample_size;
  d["seed"] = s.seed;
  d["iterations"] = s.iterations;
  d["termination"] = to_string(s.termination);
  d["final_gap"] = s.final_gap;
  d["final_exact_gap"] = s.final_exact_gap;
  d["final_objective"] = s.final_objective;
  d["support_vectors"] = s.support_vectors;
  d["mean_support_size"] = s.mean_support_size;
  d["sampling_advisable"] = s.sampling_advisable;
  d["solve_seconds"] = s.timings.solve_seconds;
  d["diagnostic_seconds"] = s.timings.diagnostic_seconds;
  d["cache_hits"] = s.cache.hits;
  d["cache_misses"] = s.cache.misses;
  d["cache_evictions"] = s.cache.evictions;
  d["kernel_evaluations"] = s.kernel_evaluations;
  d["resync_checks"] = s.resync_checks;
  d["max_resync_objective_error"] = s.max_resync_objective_error;
  d["max_resync_gradient_error"] = s.max_resync_gradient_error;
  return d;
}

py::dict trace_dict(const RunTrace& t) {
  const std::size_t n = t.steps.size();
  py::array_t<std::int64_t> iteration(n), vertex(n), support(n);
  py::array_t<double> lambda(n), gap_approx(n), gap_exact(n), objective(n);
  auto it = iteration.mutable_unchecked<1>();
  auto vx = vertex.mutable_unchecked<1>();
  auto su = support.mutable_unchecked<1>();
  auto la = lambda.mutable_unchecked<1>();
  auto ga = gap_approx.mutable_unchecked<1>();
  auto ge = gap_exact.mutable_unchecked<1>();
  auto ob = objective.mutable_unchecked<1>();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = t.steps[k];
    it(k) = static_cast<std::int64_t>(r.iteration);
    vx(k) = static_cast<std::int64_t>(r.vertex);
    su(k) = static_cast<std::int64_t>(r.support_size);
    la(k) = r.lambda;
    ga(k) = r.gap_approx;
    ge(k) = r.gap_exact.value_or(std::numeric_limits<double>::quiet_NaN());
    ob(k) = r.objective;
  }
  py::dict d;
  d["iteration"] = iteration;
  d["vertex"] = vertex;
  d["lambda"] = lambda;
  d["gap_approx"] = gap_approx;
  d["gap_exact"] = gap_exact;
  d["objective"] = objective;
  d["support_size"] = support;
  return d;
}

KernelSpec make_spec(double gamma, double c, const std::string& mode) {
  KernelSpec spec{gamma, c, kernel_mode_from_string(mode)};
  spec.validate();
  return spec;
}

py::dict aggregate_dict(const Aggregate& a) {
  py::dict d;
  d["mean"] = a.mean;
  d["std"] = a.stddev;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frank-Wolfe L2-SVM solver core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<SparseDataset>(m, "Dataset")
      .def(py::init(&from_dense), py::arg("X"), py::arg("y"), "Dense (m, d) features and +1/-1 labels.")
      .def_property_readonly("size", &SparseDataset::size)
      .def_property_readonly("dim", &SparseDataset::dim)
      .def_property_readonly("labels", [](const SparseDataset& ds) { return py::array_t<int>(ds.labels().size(), ds.labels().data()); })
      .def("__len__", &SparseDataset::size)
      .def("to_dense", &to_dense)
      .def("to_libsvm",
           [](const SparseDataset& ds) {
             std::ostringstream out;
             write_libsvm(out, ds);
             return out.str();
           })
      .def("subsample", &subsample, py::arg("n"), py::arg("seed"))
      .def(py::self == py::self);

  m.def(
      "parse_libsvm",
      [](const std::string& text, bool remap) { return parse_libsvm_string(text, ParseOptions{remap}); },
      py::arg("text"), py::arg("remap_zero_one") = false);
  m.def(
      "load_libsvm", [](const std::string& path, bool remap) { return load_libsvm(path, ParseOptions{remap}); },
      py::arg("path"), py::arg("remap_zero_one") = false);
  m.def("make_two_clusters", &make_two_clusters, py::arg("m"), py::arg("dim"), py::arg("separation"),
        py::arg("seed"));
  m.def("make_census_like", &make_census_like, py::arg("m"), py::arg("seed"), py::arg("population_seed") = 2014);

  py::class_<SvmModel>(m, "Model")
      .def_property_readonly("support_count", &SvmModel::support_count)
      .def_property_readonly("gamma", [](const SvmModel& s) { return s.spec().gamma; })
      .def_property_readonly("c", [](const SvmModel& s) { return s.spec().c; })
      .def_property_readonly("kernel_mode", [](const SvmModel& s) { return to_string(s.spec().mode); })
      .def_property_readonly("support_indices",
                             [](const SvmModel& s) {
                               std::vector<std::size_t> out;
                               for (const auto& sv : s.support()) out.push_back(sv.index);
                               return out;
                             })
      .def_property_readonly("support_alpha",
                             [](const SvmModel& s) {
                               std::vector<double> out;
                               for (const auto& sv : s.support()) out.push_back(sv.alpha);
                               return py::array_t<double>(out.size(), out.data());
                             })
      .def("decision_function",
           [](const SvmModel& s, const SparseDataset& ds) {
             py::array_t<double> out(ds.size());
             auto o = out.mutable_unchecked<1>();
             for (std::size_t i = 0; i < ds.size(); ++i) o(i) = s.decision_value(ds.row(i));
             return out;
           })
      .def("predict",
           [](const SvmModel& s, const SparseDataset& ds) {
             py::array_t<int> out(ds.size());
             auto o = out.mutable_unchecked<1>();
             for (std::size_t i = 0; i < ds.size(); ++i) o(i) = s.predict(ds.row(i));
             return out;
           })
      .def("save", &SvmModel::save_file, py::arg("path"))
      .def_static("load", &SvmModel::load_file, py::arg("path"))
      .def("to_string",
           [](const SvmModel& s) {
             std::ostringstream out;
             s.save(out);
             return out.str();
           })
      .def_static("from_string",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return SvmModel::load(in);
                  })
      .def(py::self == py::self);

  py::class_<SolveResult>(m, "SolveResult")
      .def_property_readonly("model", [](const SolveResult& r) { return r.model; })
      .def_property_readonly("summary", [](const SolveResult& r) { return summary_dict(r.summary); })
      .def_property_readonly("trace", [](const SolveResult& r) { return trace_dict(r.trace); })
      .def_property_readonly("alpha", [](const SolveResult& r) {
        return py::array_t<double>(r.state.alpha().size(), r.state.alpha().data());
      });

  m.def(
      "solve",
      [](const SparseDataset& ds, double gamma, double c, double epsilon, std::size_t sample_size,
         std::uint64_t seed, std::size_t max_iters, std::size_t patience, std::size_t exact_gap_every,
         std::size_t resync_every, std::size_t cache_rows, const std::string& kernel_mode) {
        SolverConfig cfg;
        if (sample_size > 0) cfg.strategy = {StrategyKind::random, sample_size, seed};
        cfg.epsilon = epsilon;
        cfg.seed = seed;
        cfg.max_iters = max_iters;
        cfg.patience = patience;
        cfg.exact_gap_every = exact_gap_every;
        cfg.resync_every = resync_every;
        cfg.cache.rows = cache_rows;
        const KernelSpec spec = make_spec(gamma, c, kernel_mode);
        py::gil_scoped_release release;
        return solve(ds, spec, cfg);
      },
      py::arg("data"), py::arg("gamma"), py::arg("c"), py::arg("epsilon") = 1e-4, py::arg("sample_size") = 0,
      py::arg("seed") = 0, py::arg("max_iters") = 1'000'000, py::arg("patience") = 1,
      py::arg("exact_gap_every") = 0, py::arg("resync_every") = 0, py::arg("cache_rows") = 1024,
      py::arg("kernel_mode") = "l2svm-effective",
      "Frank-Wolfe training; sample_size 0 scans all coordinates.");

  m.def("evaluate", &evaluate, py::arg("model"), py::arg("data"), "Fraction of correctly predicted labels.");
  m.def("min_rank_bound", &min_rank_bound, py::arg("m"), py::arg("m_tilde"), py::arg("r"));
  m.def("min_rank_montecarlo", &min_rank_montecarlo, py::arg("m"), py::arg("m_tilde"), py::arg("r"),
        py::arg("trials"), py::arg("seed") = 1);
  m.def(
      "verify_sampling",
      [](std::size_t mm, std::size_t m_tilde, std::size_t r, std::size_t trials, std::uint64_t seed) {
        const auto rep = verify_sampling(mm, m_tilde, r, trials, seed);
        py::dict d;
        d["bound"] = rep.bound;
        d["empirical"] = rep.empirical;
        d["sigma"] = rep.sigma;
        d["pass"] = rep.pass;
        return d;
      },
      py::arg("m"), py::arg("m_tilde"), py::arg("r"), py::arg("trials") = 10000, py::arg("seed") = 1);

  m.def(
      "run_benchmark",
      [](const std::string& plan_path) {
        const BenchPlan plan = load_plan(plan_path);
        BenchReport rep;
        {
          py::gil_scoped_release release;
          rep = run_benchmark(plan);
        }
        py::list cells;
        for (const auto& cell : rep.cells) {
          py::dict d;
          d["sample_size"] = sample_size_label(cell.sample_size);
          d["runs"] = cell.runs.size();
          d["failures"] = cell.failures;
          d["test_accuracy"] = aggregate_dict(cell.test_accuracy);
          d["solve_seconds"] = aggregate_dict(cell.solve_seconds);
          d["iterations"] = aggregate_dict(cell.iterations);
          d["support_vectors"] = aggregate_dict(cell.support_vectors);
          d["mean_support"] = aggregate_dict(cell.mean_support);
          d["sampling_advisable"] = cell.sampling_advisable;
          cells.append(d);
        }
        return cells;
      },
      py::arg("plan_path"), "Runs a JSON plan and returns per-size aggregates.");
}
