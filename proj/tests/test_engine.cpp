#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "radar/engine.hpp"
#include "radar/geometry.hpp"
#include "radar/oracles.hpp"
#include "radar/rng.hpp"
#include "radar/vector_ops.hpp"

using namespace radar;

namespace {

ProblemInstance pool_instance(int d, std::uint64_t seed) {
  Rng rng(seed);
  ProblemInstance instance;
  instance.d = d;
  instance.s = 2;
  instance.covariate_bound = 1.0;
  instance.noise_std_sq = 0.0;
  instance.loss = LossKind::least_squares;
  instance.theta_star = make_sparse_target(d, 2, rng);
  return instance;
}

}  // namespace

TEST_CASE("zero dynamics: zero oracle and zero lambda hold the center") {
  const int d = 5;
  ProblemInstance instance = pool_instance(d, 3);
  instance.theta_star.assign(d, 0.0);
  // single noiseless sample with x = 0 gives a zero gradient forever
  Sample zero_sample;
  zero_sample.x.assign(d, 0.0);
  zero_sample.y = 0.0;
  GradientOracle oracle(instance, {zero_sample}, 5);

  const LpGeometry geom = LpGeometry::for_dimension(d);
  DenseVector center{0.1, -0.2, 0.0, 0.4, 0.0};
  EpochState state = make_epoch_state(center, 1.0, 0.0, 1.0);
  const EpochResult result = run_epoch(oracle, state, 50, geom, nullptr);
  CHECK(result.iterations_used == 50);
  CHECK(state.theta == center);  // iterates never move, bitwise
  for (int j = 0; j < d; ++j) {
    // the running mean of identical iterates re-rounds per addition
    CHECK(result.theta_avg[j] ==
          doctest::Approx(center[j]).epsilon(1e-14));
  }
}

TEST_CASE("single iteration equals one hand-unrolled dual-averaging step") {
  const int d = 4;
  ProblemInstance instance = pool_instance(d, 7);
  Rng sample_rng(11);
  const Sample sample = sample_ls(instance, sample_rng);
  GradientOracle oracle(instance, {sample}, 13);

  const LpGeometry geom = LpGeometry::for_dimension(d);
  const DenseVector center(d, 0.0);
  const double radius = 2.0, lambda = 0.3, alpha = 0.7;

  EpochState state = make_epoch_state(center, radius, lambda, alpha);
  const EpochResult result = run_epoch(oracle, state, 1, geom, nullptr);

  // mu_1 = g_0 + lambda v_0 with theta_0 = center; v_0 = sign(center) = 0
  DenseVector mu = ls_gradient(center, sample);
  axpy(mu, lambda, l1_subgradient(center));
  const DenseVector expected =
      dual_averaging_step(mu, center, radius, alpha / 1.0, geom);
  CHECK(result.theta_avg == expected);
  CHECK(state.mu == mu);
}

TEST_CASE("dual average equals the exact subgradient sum (replay)") {
  const int d = 6;
  ProblemInstance instance = pool_instance(d, 17);
  Rng sample_rng(19);
  const Sample sample = sample_ls(instance, sample_rng);

  const LpGeometry geom = LpGeometry::for_dimension(d);
  const DenseVector center(d, 0.0);
  const double radius = 1.5, lambda = 0.25, alpha = 0.9;
  const int T = 200;

  GradientOracle oracle(instance, {sample}, 23);
  EpochState state = make_epoch_state(center, radius, lambda, alpha);
  run_epoch(oracle, state, T, geom, nullptr);

  // replay the recursion by hand with the same (single-sample) oracle
  DenseVector mu(d, 0.0);
  DenseVector theta = center;
  for (int t = 0; t < T; ++t) {
    DenseVector g = ls_gradient(theta, sample);
    axpy(g, lambda, l1_subgradient(theta));
    add_inplace(mu, g);
    theta = dual_averaging_step(mu, center, radius,
                                alpha / std::sqrt(t + 1.0), geom);
  }
  CHECK(state.mu == mu);      // exact, bitwise
  CHECK(state.theta == theta);
}

TEST_CASE("feasibility of iterates and average containment") {
  const int d = 12;
  Rng rng(29);
  ProblemInstance instance;
  instance.d = d;
  instance.s = 3;
  instance.covariate_bound = 1.0;
  instance.noise_std_sq = 0.5;
  instance.loss = LossKind::least_squares;
  instance.theta_star = make_sparse_target(d, 3, rng);

  GradientOracle oracle(instance, 31);
  const LpGeometry geom = LpGeometry::for_dimension(d);
  const DenseVector center(d, 0.1);
  const double radius = 0.8;

  RunTrace trace;
  trace.stride = 1;  // record every iterate
  TraceSink sink(trace, instance.theta_star, geom);
  sink.begin_epoch(1, center, radius, 0.2);

  EpochState state = make_epoch_state(center, radius, 0.2, 0.5);
  const EpochResult result = run_epoch(oracle, state, 300, geom, &sink);

  CHECK(sink.max_feasibility_ratio() <= 1.0 + 1e-9);
  CHECK(distance_lp(result.theta_avg, center, geom.p) <=
        radius * (1.0 + 1e-9));
  // norm sandwich carries feasibility to the l1 ball
  CHECK(distance_l1(result.theta_avg, center) <=
        std::exp(1.0) * radius * (1.0 + 1e-9));
  CHECK(trace.points.size() == 300);
}

TEST_CASE("early stop rule fires on the running average") {
  const int d = 5;
  ProblemInstance instance = pool_instance(d, 37);
  GradientOracle oracle(instance, 41);
  const LpGeometry geom = LpGeometry::for_dimension(d);

  EpochState state = make_epoch_state(DenseVector(d, 0.0), 1.0, 0.1, 0.5);
  std::int64_t seen = 0;
  StopRule stop = [&seen](const DenseVector&, std::int64_t t) {
    seen = t;
    return t >= 17;
  };
  const EpochResult result =
      run_epoch(oracle, state, 1000, geom, nullptr, &stop);
  CHECK(result.iterations_used == 17);
  CHECK(seen == 17);
}

TEST_CASE("nonpositive epoch length is a no-op returning the center") {
  const int d = 4;
  ProblemInstance instance = pool_instance(d, 43);
  GradientOracle oracle(instance, 47);
  const LpGeometry geom = LpGeometry::for_dimension(d);
  const DenseVector center{1.0, 2.0, -1.0, 0.0};
  EpochState state = make_epoch_state(center, 1.0, 0.0, 1.0);
  const EpochResult result = run_epoch(oracle, state, 0, geom, nullptr);
  CHECK(result.iterations_used == 0);
  CHECK(result.theta_avg == center);
  CHECK(oracle.queries_served() == 0);
}

TEST_CASE("deterministic pool run is bitwise reproducible") {
  const int d = 8;
  ProblemInstance instance = pool_instance(d, 53);
  Rng sample_rng(59);
  std::vector<Sample> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(sample_ls(instance, sample_rng));
  const LpGeometry geom = LpGeometry::for_dimension(d);

  auto run_once = [&]() {
    GradientOracle oracle(instance, pool, 61);
    EpochState state = make_epoch_state(DenseVector(d, 0.0), 1.0, 0.05, 0.4);
    return run_epoch(oracle, state, 500, geom, nullptr).theta_avg;
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("noiseless single-sample pool: objective gap shrinks with T") {
  // deterministic quadratic f(theta) = (y - <x, theta>)^2 / 2 with an
  // attainable zero minimum inside the ball
  const int d = 6;
  Rng rng(67);
  ProblemInstance instance;
  instance.d = d;
  instance.s = 2;
  instance.covariate_bound = 1.0;
  instance.noise_std_sq = 0.0;
  instance.loss = LossKind::least_squares;
  instance.theta_star = make_sparse_target(d, 2, rng);

  Rng sample_rng(71);
  const Sample sample = sample_ls(instance, sample_rng);
  const LpGeometry geom = LpGeometry::for_dimension(d);

  auto f_value = [&](const DenseVector& theta) {
    const double residual = sample.y - dot(sample.x, theta);
    return 0.5 * residual * residual;
  };

  const double radius = l1_norm(instance.theta_star);
  auto gap_at = [&](int T) {
    GradientOracle oracle(instance, {sample}, 73);
    EpochState state =
        make_epoch_state(DenseVector(d, 0.0), radius, 0.0, 0.5 * radius);
    const EpochResult result = run_epoch(oracle, state, T, geom, nullptr);
    return f_value(result.theta_avg);  // f minimum is 0 at theta_star
  };

  const double gap_small = gap_at(100);
  const double gap_large = gap_at(10000);
  CHECK(gap_large < gap_small);
}

TEST_CASE("trace records the canonical grid plus forced boundaries") {
  RunTrace trace;
  trace.stride = 10;
  CHECK(trace.on_grid(1));
  CHECK(trace.on_grid(10));
  CHECK(trace.on_grid(20));
  CHECK(!trace.on_grid(15));

  CHECK(RunTrace::default_stride(20000) == 40);
  CHECK(RunTrace::default_stride(100) == 1);

  const int d = 4;
  ProblemInstance instance = pool_instance(d, 79);
  GradientOracle oracle(instance, 83);
  const LpGeometry geom = LpGeometry::for_dimension(d);
  TraceSink sink(trace, instance.theta_star, geom);
  sink.begin_epoch(1, instance.theta_star, 1.0, 0.0);

  EpochState state =
      make_epoch_state(DenseVector(d, 0.0), 1.0, 0.0, 0.3);
  run_epoch(oracle, state, 25, geom, &sink);
  // grid points 1, 10, 20
  REQUIRE(trace.points.size() == 3);
  CHECK(trace.points[0].iteration == 1);
  CHECK(trace.points[1].iteration == 10);
  CHECK(trace.points[2].iteration == 20);
  // forcing the boundary appends iteration 25 exactly once
  sink.observe(state.theta, sink.global_iteration(), true);
  sink.observe(state.theta, sink.global_iteration(), true);
  REQUIRE(trace.points.size() == 4);
  CHECK(trace.points[3].iteration == 25);
  // strictly increasing iterations
  for (std::size_t i = 1; i < trace.points.size(); ++i) {
    CHECK(trace.points[i].iteration > trace.points[i - 1].iteration);
  }
}

TEST_CASE("trace csv round trip") {
  RunTrace trace;
  trace.stride = 2;
  for (int i = 1; i <= 3; ++i) {
    TracePoint point;
    point.iteration = i * 2;
    point.epoch = i;
    point.error_l2_sq = 0.123456789012345 * i;
    point.error_l1 = 1.9876543210987 / i;
    point.radius = std::sqrt(2.0) / i;
    point.lambda = 0.05256521770650186;
    trace.points.push_back(point);
  }
  const std::string csv = trace_to_csv(trace, 3, "radar");
  const RunTrace parsed = trace_from_csv(csv);
  REQUIRE(parsed.points.size() == trace.points.size());
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    CHECK(parsed.points[i].iteration == trace.points[i].iteration);
    CHECK(parsed.points[i].epoch == trace.points[i].epoch);
    // shortest round-trip formatting parses back bit-exactly
    CHECK(parsed.points[i].error_l2_sq == trace.points[i].error_l2_sq);
    CHECK(parsed.points[i].error_l1 == trace.points[i].error_l1);
    CHECK(parsed.points[i].radius == trace.points[i].radius);
    CHECK(parsed.points[i].lambda == trace.points[i].lambda);
  }
}
