#include "radar/selfcheck.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>

#include "radar/drivers.hpp"
#include "radar/harness.hpp"
#include "radar/oracles.hpp"
#include "radar/schedule.hpp"
#include "radar/validation.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

namespace {

bool close_rel(double actual, double expected, double rel_tol) {
  return std::fabs(actual - expected) <=
         rel_tol * std::max(1.0, std::fabs(expected));
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const AlgorithmSummary& summary_for(const ExperimentResult& result,
                                    const std::string& name) {
  for (const AlgorithmSummary& summary : result.summaries) {
    if (summary.algorithm == name) return summary;
  }
  throw computation_error("selfcheck: missing summary for " + name);
}

double mean_error_at(const AlgorithmSummary& summary,
                     std::int64_t iteration) {
  for (const SummaryRow& row : summary.rows) {
    if (row.iteration == iteration) return row.mean_error_l2_sq;
  }
  throw computation_error("selfcheck: no summary row at iteration " +
                          std::to_string(iteration));
}

CriterionResult check_prox_kernel() {
  CriterionResult criterion{1, "prox kernel matches numerical minimizer",
                            true, ""};
  std::ostringstream detail;
  for (int d : {3, 10, 50}) {
    const ProxCheckStats stats = run_prox_check(d, 100, 20120924);
    detail << "d=" << d << " linf=" << stats.max_linf_gap
           << " fgap=" << stats.max_objective_gap << "; ";
    if (stats.max_linf_gap > 1e-6 || stats.max_objective_gap > 1e-8 ||
        stats.max_feasibility_excess > 1e-9) {
      criterion.passed = false;
    }
  }
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_feasibility(const ExperimentResult& result,
                                  const ExperimentSpec& spec) {
  CriterionResult criterion{2, "iterate feasibility and exact radius chain",
                            true, ""};
  double worst_ratio = 0.0;
  bool chain_exact = true;
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    if (spec.algorithms[a] != AlgorithmKind::radar) continue;
    for (const RunResult& run : result.results[a]) {
      worst_ratio = std::max(worst_ratio, run.max_feasibility_ratio);
      const auto& epochs = run.plan_used.epochs;
      for (std::size_t i = 0; i + 1 < epochs.size(); ++i) {
        if (epochs[i + 1].radius_sq != epochs[i].radius_sq * 0.5) {
          chain_exact = false;
        }
      }
    }
  }
  criterion.passed = worst_ratio <= 1.0 + 1e-9 && chain_exact;
  std::ostringstream detail;
  detail << "max ||theta-c||_p/R = " << worst_ratio
         << (chain_exact ? ", radius chain exact" : ", RADIUS CHAIN BROKEN");
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_rates(const ExperimentResult& result) {
  CriterionResult criterion{3, "trailing-decade rate windows", true, ""};
  const double radar_slope =
      summary_for(result, "radar").slope_trailing_decade;
  const double rda_slope = summary_for(result, "rda").slope_trailing_decade;
  criterion.passed = radar_slope >= -1.4 && radar_slope <= -0.6 &&
                     rda_slope >= -0.8 && rda_slope <= -0.2 &&
                     radar_slope <= rda_slope - 0.25;
  std::ostringstream detail;
  detail << "radar slope=" << radar_slope << " (want [-1.4,-0.6]), rda slope="
         << rda_slope << " (want [-0.8,-0.2]), separation="
         << rda_slope - radar_slope << " (want >= 0.25)";
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_figure1(const ExperimentResult& result) {
  CriterionResult criterion{4, "final-error ordering vs rda and sgd", true,
                            ""};
  const double radar_final = summary_for(result, "radar").final_mean_error;
  const double rda_final = summary_for(result, "rda").final_mean_error;
  const double sgd_final = summary_for(result, "sgd").final_mean_error;
  criterion.passed =
      2.0 * radar_final <= rda_final && 2.0 * radar_final <= sgd_final;
  std::ostringstream detail;
  detail << "final mean error: radar=" << radar_final << " rda=" << rda_final
         << " sgd=" << sgd_final << " (want radar at least 2x below both)";
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_figure2(const ExperimentResult& result,
                              std::int64_t total_budget) {
  CriterionResult criterion{5, "annealing vs fixed-lambda and constant epochs",
                            true, ""};
  const AlgorithmSummary& radar = summary_for(result, "radar");
  const AlgorithmSummary& eda = summary_for(result, "eda");
  const AlgorithmSummary& radar_const = summary_for(result, "radar_const");

  const std::int64_t early = total_budget / 10;
  const double radar_early = mean_error_at(radar, early);
  const double const_early = mean_error_at(radar_const, early);

  criterion.passed = radar.final_mean_error <= eda.final_mean_error &&
                     const_early > radar_early &&
                     radar_const.final_mean_error <=
                         10.0 * radar.final_mean_error;
  std::ostringstream detail;
  detail << "final: radar=" << radar.final_mean_error
         << " eda=" << eda.final_mean_error
         << " radar_const=" << radar_const.final_mean_error << "; at T/10:"
         << " radar=" << radar_early << " radar_const=" << const_early;
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_unbiasedness() {
  CriterionResult criterion{6, "least-squares gradient oracle unbiasedness",
                            true, ""};
  const int d = 50;
  const int n = 100000;

  Rng target_rng(7101);
  ProblemInstance instance;
  instance.d = d;
  instance.s = 7;
  instance.covariate_bound = 1.0;
  instance.noise_std_sq = 0.5;
  instance.loss = LossKind::least_squares;
  instance.theta_star = make_sparse_target(d, instance.s, target_rng);

  DenseVector theta(d);
  for (int j = 0; j < d; ++j) theta[j] = 0.3 * ((j % 3) - 1.0);

  GradientOracle oracle(instance, 90210);
  DenseVector sum(d, 0.0), sum_sq(d, 0.0);
  for (int k = 0; k < n; ++k) {
    const DenseVector g = oracle.query(theta);
    for (int j = 0; j < d; ++j) {
      sum[j] += g[j];
      sum_sq[j] += g[j] * g[j];
    }
  }

  double worst_z = 0.0;
  for (int j = 0; j < d; ++j) {
    const double mean = sum[j] / n;
    const double expected = (theta[j] - instance.theta_star[j]) / 3.0;
    const double variance =
        std::max((sum_sq[j] - n * mean * mean) / (n - 1.0), 1e-300);
    const double se = std::sqrt(variance / n);
    worst_z = std::max(worst_z, std::fabs(mean - expected) / se);
  }
  criterion.passed = worst_z <= 3.0;
  std::ostringstream detail;
  detail << "max |mean - (theta-theta*)/3| over coordinates = " << worst_z
         << " standard errors (want <= 3)";
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_schedule_arithmetic() {
  CriterionResult criterion{7, "schedule arithmetic reproduces hand values",
                            true, ""};
  std::ostringstream detail;
  auto expect = [&](const char* name, double actual, double expected) {
    if (!close_rel(actual, expected, 1e-9)) {
      criterion.passed = false;
      detail << name << "=" << actual << " (want " << expected << ") ";
    }
  };

  ProblemConstants lip;
  lip.loss = LossKind::logistic;  // radius-free constants
  lip.log_dim = 3.0;
  lip.gamma = 1.0;
  lip.sparsity = 1;
  lip.omega = 0.0;
  lip.lipschitz_g = 1.0;
  lip.noise_sigma = 1.0;
  expect("epoch_length",
         static_cast<double>(epoch_length(lip, 1.0, 1, 1.0)), 9.0);

  ProblemConstants unit = lip;
  unit.log_dim = 1.0;
  unit.lipschitz_g = 1.0;
  unit.noise_sigma = 0.0;
  expect("epoch_lambda", epoch_lambda(unit, 1.0, 1, 1), 1.0);
  expect("kappa_T", kappa_T(unit, 1.0, 2), 1.0);

  expect("omega_i", omega_i(0.0, std::exp(1.0)), std::sqrt(24.0));

  const auto [g_ls, sigma_ls] = ls_constants(1.0, 0.5, 1.0);
  expect("ls_constants.G", g_ls, 1.0 / 3.0);
  expect("ls_constants.sigma", sigma_ls, std::sqrt(42.0));

  const LogisticConstants logistic = logistic_constants(1.0, 0.0, 1.0 / 3.0);
  expect("logistic_constants.G", logistic.g, 1.0);
  expect("logistic_constants.sigma", logistic.sigma, 2.0);
  expect("logistic_constants.gamma", logistic.gamma, 1.0 / 12.0);

  expect("approx_error", approx_error({1.0, 0.5}, {0}, 0.0, 1.0), 0.25);

  if (criterion.passed) detail << "all hand values reproduced";
  criterion.detail = detail.str();
  return criterion;
}

CriterionResult check_determinism(const std::string& scratch_dir) {
  CriterionResult criterion{8, "byte-identical reruns under parallelism",
                            true, ""};
  ExperimentSpec spec;
  spec.dimension = 300;
  spec.total_budget = 5000;
  spec.trials = 3;
  spec.seed = 404;
  spec.algorithms = {AlgorithmKind::radar, AlgorithmKind::radar_const,
                     AlgorithmKind::eda, AlgorithmKind::rda,
                     AlgorithmKind::sgd};
  spec.epoch_mode = EpochMode::oracle_halving;

  spec.workers = 1;
  spec.out_dir = scratch_dir + "/determinism_serial";
  const ExperimentResult serial = run_experiment(spec);

  spec.workers = 16;  // oversubscribed on purpose
  spec.out_dir = scratch_dir + "/determinism_parallel";
  const ExperimentResult parallel = run_experiment(spec);

  int compared = 0;
  bool identical = serial.files_written.size() == parallel.files_written.size();
  if (identical) {
    for (std::size_t i = 0; i < serial.files_written.size(); ++i) {
      const std::string& path = serial.files_written[i];
      if (path.size() < 10 ||
          path.substr(path.size() - 10) != ".trace.csv") {
        continue;
      }
      ++compared;
      if (read_bytes(path) != read_bytes(parallel.files_written[i])) {
        identical = false;
        break;
      }
    }
  }
  criterion.passed = identical && compared > 0;
  std::ostringstream detail;
  detail << compared << " trace files compared, "
         << (identical ? "all byte-identical" : "MISMATCH");
  criterion.detail = detail.str();
  return criterion;
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(
    const std::string& scratch_dir, std::ostream& log) {
  std::vector<CriterionResult> results;
  auto report = [&](CriterionResult criterion) {
    log << (criterion.passed ? "PASS" : "FAIL") << " criterion "
        << criterion.index << ": " << criterion.name << " [" << criterion.detail
        << "]\n";
    log.flush();
    results.push_back(std::move(criterion));
  };

  report(check_prox_kernel());

  // One desk-scale experiment feeds criteria 2 through 5.
  ExperimentSpec spec;
  spec.dimension = 1000;
  spec.total_budget = 20000;
  spec.trials = 5;
  spec.seed = 1;
  spec.algorithms = {AlgorithmKind::radar, AlgorithmKind::radar_const,
                     AlgorithmKind::eda, AlgorithmKind::rda,
                     AlgorithmKind::sgd};
  spec.epoch_mode = EpochMode::oracle_halving;
  spec.out_dir = scratch_dir + "/desk_scale";
  const ExperimentResult desk = run_experiment(spec);

  report(check_feasibility(desk, spec));
  report(check_rates(desk));
  report(check_figure1(desk));
  report(check_figure2(desk, spec.total_budget));
  report(check_unbiasedness());
  report(check_schedule_arithmetic());
  report(check_determinism(scratch_dir));
  return results;
}

}  // namespace radar
