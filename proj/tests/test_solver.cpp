#include <doctest.h>

#include <cmath>

#include "fwsvm/error.hpp"
#include "fwsvm/solver.hpp"
#include "fwsvm/synthetic.hpp"
#include "oracles.hpp"

using namespace fwsvm;

namespace {

const KernelSpec kSpec{0.5, 5.0, KernelMode::l2svm_effective};

SolverConfig full_config(double eps = 1e-4) {
  SolverConfig cfg;
  cfg.epsilon = eps;
  cfg.cache.rows = 4096;
  return cfg;
}

SolverConfig sampled_config(std::size_t size, double eps = 1e-4) {
  SolverConfig cfg = full_config(eps);
  cfg.strategy.kind = StrategyKind::random;
  cfg.strategy.sample_size = size;
  return cfg;
}

}  // namespace

TEST_CASE("single point terminates immediately") {
  const SparseDataset one({SparseRow{{0}, {1.0}}}, {-1});
  const auto res = solve(one, kSpec, full_config());
  CHECK(res.summary.iterations == 0);
  CHECK(res.summary.termination == Termination::gap_converged);
  CHECK(res.model.support_count() == 1);
  CHECK(res.model.support()[0].alpha == 1.0);
  CHECK(res.summary.final_objective == doctest::Approx(0.5 * (2.0 + 1.0 / 5.0)));
}

TEST_CASE("identity instance reaches the barycenter in one step") {
  const auto res = solve(oracle::identity_pair(), oracle::raw_spec(), full_config(1e-12));
  CHECK(res.summary.iterations == 1);
  CHECK(res.state.alpha()[0] == 0.5);
  CHECK(res.state.alpha()[1] == 0.5);
  CHECK(res.summary.final_objective == 0.25);
  CHECK(res.summary.final_gap == 0.0);
  REQUIRE(res.trace.steps.size() == 1);
  CHECK(res.trace.steps[0].lambda == 0.5);
}

TEST_CASE("mean support size") {
  RunTrace trace;
  for (std::size_t s : {1, 2, 3}) {
    StepRecord r;
    r.support_size = s;
    trace.steps.push_back(r);
  }
  const SvmModel model(kSpec, {SupportVector{0, 1.0, 1, SparseRow{}}});
  CHECK(run_summary(trace, model, {}).mean_support_size == 2.0);
  CHECK(run_summary(RunTrace{}, model, {}).mean_support_size == 1.0);
}

TEST_CASE("converged objective matches an independent QP solve") {
  const auto ds = oracle::random_dataset(40, 3, 33);
  const auto res = solve(ds, kSpec, full_config(1e-7));
  REQUIRE(res.summary.termination == Termination::gap_converged);
  const auto opt = oracle::simplex_qp_optimum(oracle::dense_kernel(ds, kSpec));
  CHECK(res.summary.final_objective >= opt.f - 1e-9);
  CHECK(res.summary.final_objective - opt.f <= 1e-7);
  CHECK(res.summary.final_gap <= 1e-7);
  CHECK(res.summary.final_exact_gap == res.summary.final_gap);
}

TEST_CASE("full sample reproduces the full scan") {
  const auto ds = make_two_clusters(150, 4, 1.0, 2);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SolverConfig f = full_config(), s = sampled_config(150);
    f.seed = s.seed = seed;
    const auto a = solve(ds, kSpec, f);
    const auto b = solve(ds, kSpec, s);
    REQUIRE(a.summary.iterations == b.summary.iterations);
    for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
      REQUIRE(a.trace.steps[k].vertex == b.trace.steps[k].vertex);
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(std::abs(a.state.alpha()[i] - b.state.alpha()[i]) <= 1e-12);
    }
  }
}

TEST_CASE("runs are deterministic given the seed") {
  const auto ds = make_two_clusters(200, 2, 1.0, 5);
  SolverConfig cfg = sampled_config(30);
  cfg.seed = 77;
  cfg.exact_gap_every = 10;
  const auto a = solve(ds, kSpec, cfg);
  const auto b = solve(ds, kSpec, cfg);
  REQUIRE(a.trace.steps.size() == b.trace.steps.size());
  for (std::size_t k = 0; k < a.trace.steps.size(); ++k) {
    CHECK(a.trace.steps[k].vertex == b.trace.steps[k].vertex);
    CHECK(a.trace.steps[k].lambda == b.trace.steps[k].lambda);
    CHECK(a.trace.steps[k].gap_exact == b.trace.steps[k].gap_exact);
  }
  CHECK(a.model == b.model);
  cfg.seed = 78;
  const auto c = solve(ds, kSpec, cfg);
  CHECK_FALSE(c.model == a.model);
}

TEST_CASE("trace is sequential and consistent") {
  const auto ds = make_two_clusters(120, 3, 1.0, 6);
  SolverConfig cfg = sampled_config(20);
  cfg.exact_gap_every = 7;
  const auto res = solve(ds, kSpec, cfg);
  double prev_f = INFINITY;
  for (std::size_t k = 0; k < res.trace.steps.size(); ++k) {
    const auto& r = res.trace.steps[k];
    REQUIRE(r.iteration == k);
    CHECK(r.vertex < ds.size());
    CHECK(r.lambda >= 0.0);
    CHECK(r.lambda <= 1.0);
    CHECK(r.objective <= prev_f + 1e-15);
    prev_f = r.objective;
    CHECK(r.gap_exact.has_value() == (k % 7 == 0));
    if (r.gap_exact) CHECK(*r.gap_exact >= r.gap_approx - 1e-12);
  }
  CHECK(res.summary.iterations == res.trace.steps.size());
}

TEST_CASE("patience and iteration cap") {
  const auto ds = make_two_clusters(200, 2, 1.0, 8);
  SolverConfig cfg = sampled_config(5, 1e-3);
  const auto p1 = solve(ds, kSpec, cfg);
  cfg.patience = 5;
  const auto p5 = solve(ds, kSpec, cfg);
  CHECK(p5.summary.iterations >= p1.summary.iterations);

  SolverConfig capped = full_config(1e-12);
  capped.max_iters = 10;
  const auto c = solve(ds, kSpec, capped);
  CHECK(c.summary.iterations == 10);
  CHECK(c.summary.termination == Termination::max_iters);
}

TEST_CASE("resync keeps the maintained quantities honest") {
  const auto ds = oracle::random_dataset(80, 3, 44);
  SolverConfig cfg = full_config(1e-6);
  cfg.resync_every = 25;
  const auto res = solve(ds, kSpec, cfg);
  CHECK(res.summary.resync_checks == res.summary.iterations / 25);
  CHECK(res.summary.max_resync_objective_error <= 1e-10);
  CHECK(res.summary.max_resync_gradient_error <= 1e-10);
}

TEST_CASE("sampling advice and stopping quality") {
  const auto ds = make_two_clusters(400, 2, 1.0, 9);
  const auto full = solve(ds, kSpec, full_config());
  CHECK_FALSE(full.summary.sampling_advisable);
  const auto s = solve(ds, kSpec, sampled_config(10));
  CHECK(s.summary.sampling_advisable == (10.0 < 400.0 / s.summary.mean_support_size));
  CHECK(s.summary.final_exact_gap >= s.summary.final_gap - 1e-12);
}

TEST_CASE("config validation") {
  const auto ds = make_two_clusters(10, 2, 1.0, 1);
  SolverConfig cfg = full_config();
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(solve(ds, kSpec, cfg), ConfigError);
  cfg = sampled_config(11);
  CHECK_THROWS_AS(solve(ds, kSpec, cfg), ConfigError);
  cfg = sampled_config(0);
  CHECK_THROWS_AS(solve(ds, kSpec, cfg), ConfigError);
  cfg = full_config();
  cfg.patience = 0;
  CHECK_THROWS_AS(solve(ds, kSpec, cfg), ConfigError);
  CHECK_THROWS(solve(SparseDataset({}, {}), kSpec, full_config()));
}

TEST_CASE("initial vertex") {
  CHECK(initial_vertex(1, 5) == 0);
  CHECK(initial_vertex(1000, 5) == initial_vertex(1000, 5));
  std::size_t distinct = 0;
  for (std::uint64_t s = 0; s < 50; ++s) distinct += initial_vertex(1000, s) != initial_vertex(1000, s + 1);
  CHECK(distinct >= 45);
}
