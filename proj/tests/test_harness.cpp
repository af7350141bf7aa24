#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "radar/errors.hpp"
#include "radar/harness.hpp"
#include "radar/oracles.hpp"
#include "radar/vector_ops.hpp"

using namespace radar;

namespace {

std::string fresh_dir(const std::string& name) {
  const std::string path = "harness_test_tmp/" + name;
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ExperimentSpec smoke_spec(const std::string& out_dir) {
  ExperimentSpec spec;
  spec.dimension = 10;
  spec.total_budget = 100;
  spec.trials = 1;
  spec.seed = 7;
  spec.algorithms = {AlgorithmKind::radar};
  spec.out_dir = out_dir;
  return spec;
}

}  // namespace

TEST_CASE("fit_rate recovers exact power laws") {
  std::vector<std::pair<std::int64_t, double>> inverse, sqrt_law, flat;
  for (std::int64_t t = 10; t <= 10000; t *= 2) {
    inverse.emplace_back(t, 100.0 / static_cast<double>(t));
    sqrt_law.emplace_back(t, 5.0 / std::sqrt(static_cast<double>(t)));
    flat.emplace_back(t, 3.25);
  }
  CHECK(fit_rate(inverse) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(fit_rate(sqrt_law) == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(fit_rate(flat) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("fit_rate input validation") {
  CHECK_THROWS_AS(fit_rate({{10, 1.0}, {20, 0.5}}), computation_error);
  // no decade of span
  CHECK_THROWS_AS(fit_rate({{10, 1.0}, {20, 0.5}, {40, 0.25}, {80, 0.12}}),
                  computation_error);
  // zero errors are unusable
  CHECK_THROWS_AS(fit_rate({{1, 0.0}, {10, 0.0}, {100, 0.0}}),
                  computation_error);
}

TEST_CASE("summarize: degenerate and hand-computed aggregations") {
  auto make_trace = [](std::vector<double> errors) {
    RunTrace trace;
    trace.stride = 10;
    std::int64_t iteration = 10;
    for (double e : errors) {
      TracePoint point;
      point.iteration = iteration;
      point.epoch = 1;
      point.error_l2_sq = e;
      trace.points.push_back(point);
      iteration += 10;
    }
    return trace;
  };

  // single trial: mean is the trial, stderr 0
  const AlgorithmSummary single =
      summarize("radar", {make_trace({4.0, 2.0, 1.0})});
  REQUIRE(single.rows.size() == 3);
  CHECK(single.rows[0].mean_error_l2_sq == 4.0);
  CHECK(single.rows[0].stderr_error == 0.0);

  // two identical traces: stderr 0
  const AlgorithmSummary twin =
      summarize("radar", {make_trace({4.0, 2.0, 1.0}),
                          make_trace({4.0, 2.0, 1.0})});
  for (const SummaryRow& row : twin.rows) CHECK(row.stderr_error == 0.0);

  // five synthetic traces, hand-computed mean and stderr at the first point
  const AlgorithmSummary five = summarize(
      "radar", {make_trace({1.0}), make_trace({2.0}), make_trace({3.0}),
                make_trace({4.0}), make_trace({5.0})});
  REQUIRE(five.rows.size() == 1);
  CHECK(five.rows[0].mean_error_l2_sq == doctest::Approx(3.0));
  // sample variance 2.5, stderr sqrt(2.5/5)
  CHECK(five.rows[0].stderr_error ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("summarize rejects mismatched grids") {
  RunTrace a, b;
  a.stride = 10;
  b.stride = 10;
  TracePoint pa;
  pa.iteration = 10;
  a.points.push_back(pa);
  TracePoint pb;
  pb.iteration = 30;
  b.points.push_back(pb);
  CHECK_THROWS_AS(summarize("radar", {a, b}), computation_error);
}

TEST_CASE("spec validation lists offending fields") {
  ExperimentSpec spec;  // no algorithms, otherwise fine
  spec.algorithms.clear();
  spec.trials = 0;
  spec.dimension = 2;
  try {
    validate_spec(spec);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    const std::string what = e.what();
    CHECK(what.find("dimension") != std::string::npos);
    CHECK(what.find("trials") != std::string::npos);
    CHECK(what.find("algorithms") != std::string::npos);
  }
}

TEST_CASE("resolved defaults: sparsity, radius, curvature, omega") {
  ExperimentSpec spec = smoke_spec("unused");
  spec.dimension = 1000;
  const ResolvedExperiment resolved = resolve_experiment(spec);
  CHECK(resolved.instance.s == 7);  // ceil(ln 1000)
  CHECK(resolved.r1 == l1_norm(resolved.instance.theta_star));
  CHECK(resolved.r1 == doctest::Approx(7.0));  // unit magnitudes
  CHECK(resolved.constants.gamma == doctest::Approx(1.0 / 3.0));
  CHECK(resolved.constants.omega ==
        doctest::Approx(std::sqrt(std::log(1000.0))));
  CHECK(resolved.constants.cov_min_eig == doctest::Approx(1.0 / 3.0));

  // explicit overrides win
  spec.sparsity = 3;
  spec.gamma = 0.2;
  spec.r1 = 9.5;
  spec.omega = 1.25;
  const ResolvedExperiment forced = resolve_experiment(spec);
  CHECK(forced.instance.s == 3);
  CHECK(forced.constants.gamma == 0.2);
  CHECK(forced.r1 == 9.5);
  CHECK(forced.constants.omega == 1.25);
}

TEST_CASE("experiment smoke run: artifacts exist and parse back") {
  const std::string out = fresh_dir("smoke");
  ExperimentSpec spec = smoke_spec(out);
  const ExperimentResult result = run_experiment(spec);

  CHECK(std::filesystem::exists(out + "/radar_trial1.trace.csv"));
  CHECK(std::filesystem::exists(out + "/radar_trial1.plan.csv"));
  CHECK(std::filesystem::exists(out + "/summary.csv"));
  CHECK(std::filesystem::exists(out + "/ratefit.csv"));
  REQUIRE(result.summaries.size() == 1);
  CHECK(result.summaries[0].algorithm == "radar");
  CHECK(result.summaries[0].rows.size() >= 2);

  // written trace parses back to the in-memory record
  const RunTrace parsed = trace_from_csv(slurp(out + "/radar_trial1.trace.csv"));
  const RunTrace& original = result.results[0][0].trace;
  REQUIRE(parsed.points.size() == original.points.size());
  for (std::size_t i = 0; i < parsed.points.size(); ++i) {
    CHECK(parsed.points[i].iteration == original.points[i].iteration);
    CHECK(parsed.points[i].error_l2_sq == original.points[i].error_l2_sq);
    CHECK(parsed.points[i].radius == original.points[i].radius);
  }

  const std::string summary = slurp(out + "/summary.csv");
  CHECK(summary.rfind(
            "algorithm,iteration,mean_error_l2_sq,stderr,"
            "slope_trailing_decade\n",
            0) == 0);
}

TEST_CASE("experiment determinism: byte-identical artifacts across reruns") {
  const std::string out_a = fresh_dir("det_a");
  const std::string out_b = fresh_dir("det_b");
  ExperimentSpec spec = smoke_spec("");
  spec.dimension = 40;
  spec.total_budget = 600;
  spec.trials = 3;
  spec.algorithms = {AlgorithmKind::radar, AlgorithmKind::sgd};

  spec.out_dir = out_a;
  spec.workers = 1;
  run_experiment(spec);
  spec.out_dir = out_b;
  spec.workers = 8;  // parallel trials must not change any byte
  run_experiment(spec);

  for (const std::string name :
       {std::string("radar_trial1.trace.csv"),
        std::string("radar_trial2.trace.csv"),
        std::string("radar_trial3.trace.csv"),
        std::string("sgd_trial1.trace.csv"), std::string("summary.csv"),
        std::string("ratefit.csv")}) {
    CHECK(slurp(out_a + "/" + name) == slurp(out_b + "/" + name));
  }
}

TEST_CASE("trials share the sample stream, algorithms are paired") {
  // oracle seeds depend on (master seed, trial) but not on the algorithm
  CHECK(oracle_seed(1, 0) == oracle_seed(1, 0));
  CHECK(oracle_seed(1, 0) != oracle_seed(1, 1));
  CHECK(oracle_seed(1, 0) != oracle_seed(2, 0));
  CHECK(target_seed(9) == target_seed(9));
  CHECK(target_seed(9) != oracle_seed(9, 0));
}

TEST_CASE("fit subcommand machinery reads traces back from disk") {
  const std::string out = fresh_dir("fitdir");
  ExperimentSpec spec = smoke_spec(out);
  spec.dimension = 40;
  spec.total_budget = 2000;
  spec.trials = 2;
  const ExperimentResult direct = run_experiment(spec);

  const std::vector<AlgorithmSummary> refit = fit_from_directory(out);
  REQUIRE(refit.size() == 1);
  CHECK(refit[0].algorithm == "radar");
  CHECK(refit[0].rows.size() == direct.summaries[0].rows.size());
  // re-fitted slope matches the original bit-for-bit (same inputs)
  CHECK(refit[0].slope_trailing_decade ==
        direct.summaries[0].slope_trailing_decade);

  CHECK_THROWS_AS(fit_from_directory(fresh_dir("empty")), computation_error);
}

TEST_CASE("config parsing: file, overrides, errors") {
  const std::string dir = fresh_dir("config");
  const std::string path = dir + "/exp.conf";
  {
    std::ofstream out(path);
    out << "# desk-scale experiment\n";
    out << "dim = 500\n";
    out << "budget = 9000\n";
    out << "algo = radar,rda\n";
    out << "epoch-mode = theoretical\n";
    out << "noise_sq = 0.25\n";
    out << "seed = 99\n";
  }
  ExperimentSpec spec = parse_config_file(path);
  CHECK(spec.dimension == 500);
  CHECK(spec.total_budget == 9000);
  REQUIRE(spec.algorithms.size() == 2);
  CHECK(spec.algorithms[0] == AlgorithmKind::radar);
  CHECK(spec.algorithms[1] == AlgorithmKind::rda);
  CHECK(spec.epoch_mode == EpochMode::doubling);
  CHECK(spec.noise_std_sq == 0.25);
  CHECK(spec.seed == 99);

  apply_config_entry(spec, "trials", "4");
  CHECK(spec.trials == 4);

  CHECK_THROWS_AS(apply_config_entry(spec, "no_such_key", "1"),
                  validation_error);
  CHECK_THROWS_AS(apply_config_entry(spec, "dim", "abc"), validation_error);
  CHECK_THROWS_AS(apply_config_entry(spec, "loss", "hinge"),
                  validation_error);
  CHECK_THROWS_AS(parse_config_file(dir + "/missing.conf"), io_error);
}

TEST_CASE("finite-pool experiments run end to end") {
  const std::string out = fresh_dir("pool");
  ExperimentSpec spec = smoke_spec(out);
  spec.dimension = 20;
  spec.total_budget = 400;
  spec.pool_size = 50;
  const ExperimentResult result = run_experiment(spec);
  CHECK(result.summaries[0].rows.size() >= 2);

  // the pool is persisted and parses back at the declared dimension
  std::ifstream pool_in(out + "/pool.csv");
  REQUIRE(pool_in.good());
  const std::vector<Sample> pool = read_pool_csv(pool_in, spec.dimension);
  CHECK(pool.size() == 50);
}

TEST_CASE("worker resolution: spec beats environment beats hardware") {
  ExperimentSpec spec = smoke_spec("unused");
  spec.workers = 3;
  CHECK(resolve_worker_count(spec, 100) == 3);
  CHECK(resolve_worker_count(spec, 2) == 2);  // capped by job count
  spec.workers = 0;
  setenv("RADAR_WORKERS", "5", 1);
  CHECK(resolve_worker_count(spec, 100) == 5);
  unsetenv("RADAR_WORKERS");
  CHECK(resolve_worker_count(spec, 100) >= 1);
}
