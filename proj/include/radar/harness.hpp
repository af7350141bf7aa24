#ifndef RADAR_HARNESS_HPP
#define RADAR_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "radar/drivers.hpp"
#include "radar/engine.hpp"
#include "radar/oracles.hpp"
#include "radar/types.hpp"

namespace radar {

// A full experiment: one synthetic problem, several algorithms, several
// trials. Zero-valued fields marked "0 ->" resolve to derived defaults.
struct ExperimentSpec {
  int dimension = 1000;
  int sparsity = 0;  // 0 -> ceil(ln d)
  LossKind loss = LossKind::least_squares;
  double covariate_bound = 1.0;  // B
  double noise_std_sq = 0.5;     // eta^2
  std::vector<AlgorithmKind> algorithms;
  int trials = 5;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::int64_t total_budget = 20000;
  std::int64_t trace_stride = 0;  // 0 -> budget/500
  EpochMode epoch_mode = EpochMode::oracle_halving;
  // Epoch-length constant. The schedule lambda scales as c1^(-1/4); at
  // c1 = 1 the first-epoch lambda sits exactly at the soft-threshold level
  // that erases a unit-magnitude target, so the default bakes in the
  // constant that makes desk-scale runs converge.
  double c1 = 4096.0;
  double r1 = 0.0;     // 0 -> ||theta_star||_1
  double gamma = 0.0;  // 0 -> per-loss default curvature
  double tau = 0.0;
  double omega = 0.0;          // 0 -> sqrt(ln d)
  double cov_min_eig = 0.0;    // 0 -> B^2/3
  double lipschitz_g = 0.0;    // 0 -> per-loss rule (Lipschitz losses)
  double noise_sigma = 0.0;    // 0 -> per-loss rule (Lipschitz losses)
  double target_magnitude = 1.0;
  double sgd_step_scale = 0.0;
  std::int64_t pool_size = 0;  // 0 -> fresh samples, else finite pool
  int workers = 0;             // 0 -> RADAR_WORKERS env or hardware
};

struct SummaryRow {
  std::string algorithm;
  std::int64_t iteration = 0;
  double mean_error_l2_sq = 0.0;
  double stderr_error = 0.0;
  double slope_trailing_decade = 0.0;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::vector<SummaryRow> rows;
  double slope_trailing_decade = 0.0;
  double final_mean_error = 0.0;
};

struct ExperimentResult {
  std::vector<std::string> files_written;
  // results[a][t]: algorithm a, trial t
  std::vector<std::vector<RunResult>> results;
  std::vector<AlgorithmSummary> summaries;
};

// Throws validation_error naming every offending field.
void validate_spec(const ExperimentSpec& spec);

// Derived quantities shared by the runner and tests.
struct ResolvedExperiment {
  ProblemInstance instance;
  ProblemConstants constants;
  double r1 = 0.0;
  std::int64_t trace_stride = 0;
};
ResolvedExperiment resolve_experiment(const ExperimentSpec& spec);

// Seed streams: the target vector and each trial's oracle draw from
// deterministic sub-streams of the master seed, so trials are independent
// of execution order.
std::uint64_t target_seed(std::uint64_t master);
std::uint64_t oracle_seed(std::uint64_t master, int trial);

// Runs every algorithm x trial (parallel across trials up to the worker
// cap), writes per-run trace and plan CSVs plus summary.csv and
// ratefit.csv into spec.out_dir, and returns everything in memory.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// OLS slope of ln(error) on ln(iteration) over the trailing decade
// (iterations >= max/10). Requires >= 3 positive points spanning at least
// one decade overall; throws computation_error otherwise.
double fit_rate(const std::vector<std::pair<std::int64_t, double>>& points);

// Mean/stderr across trials on the common iteration grid, plus the
// trailing-decade slope of the mean series. Throws computation_error when
// the traces do not share a usable grid.
AlgorithmSummary summarize(const std::string& algorithm,
                           const std::vector<RunTrace>& traces);

// Re-fit slopes from trace files previously written to a directory.
std::vector<AlgorithmSummary> fit_from_directory(const std::string& dir);

// Flat key=value config file (comments with '#'); keys match the CLI flag
// names. Unknown keys are validation errors.
ExperimentSpec parse_config_file(const std::string& path);
void apply_config_entry(ExperimentSpec& spec, const std::string& key,
                        const std::string& value);

int resolve_worker_count(const ExperimentSpec& spec, int jobs);

}  // namespace radar

#endif
