#ifndef RADAR_DRIVERS_HPP
#define RADAR_DRIVERS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "radar/engine.hpp"
#include "radar/oracles.hpp"
#include "radar/schedule.hpp"
#include "radar/types.hpp"

namespace radar {

enum class AlgorithmKind {
  radar,        // annealed multi-epoch dual averaging
  radar_const,  // same, constant epoch lengths from the budget shorthand
  eda,          // multi-epoch structure with a fixed lambda
  rda,          // single-phase regularized dual averaging
  sgd,          // l1-projected stochastic gradient descent
};

AlgorithmKind algorithm_from_name(const std::string& name);
std::string algorithm_name(AlgorithmKind kind);

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::radar;
  double r1 = 0.0;  // initial radius; must upper-bound ||theta_star||_1
  std::int64_t total_budget = 0;
  EpochMode epoch_mode = EpochMode::oracle_halving;
  ProblemConstants constants;
  double c1 = 1.0;
  std::int64_t trace_stride = 0;  // 0 -> budget/500
  // SGD step is step_scale / t; 0 resolves to 1/gamma.
  double sgd_step_scale = 0.0;
  // Cap on one adaptive epoch, as a multiple of its theoretical length.
  double halving_overrun_factor = 4.0;
};

// Executed-epoch audit: entry error is measured at the prox center that
// opened the epoch, exit error at the center it produced.
struct EpochAudit {
  int index = 0;
  std::int64_t iterations = 0;
  double radius_sq = 0.0;
  double entry_error_p_sq = 0.0;
  double exit_error_p_sq = 0.0;
  bool halved = false;        // exit <= entry/2
  bool force_terminated = false;
};

struct RunResult {
  DenseVector final_iterate;
  RunTrace trace;
  int epochs_completed = 0;
  EpochPlan plan_used;  // executed lengths/radii/lambdas/alphas
  std::vector<EpochAudit> epoch_audits;
  double max_feasibility_ratio = 0.0;  // over traced iterates
};

RunResult run_radar(GradientOracle& oracle, const AlgorithmConfig& config);
RunResult run_radar_const(GradientOracle& oracle,
                          const AlgorithmConfig& config);
RunResult run_eda(GradientOracle& oracle, const AlgorithmConfig& config);
RunResult run_rda(GradientOracle& oracle, const AlgorithmConfig& config);
RunResult run_sgd(GradientOracle& oracle, const AlgorithmConfig& config);

// Dispatch on config.kind.
RunResult run_algorithm(GradientOracle& oracle, const AlgorithmConfig& config);

// The fixed regularization 4 eta sqrt(ln d / T) shared by RDA and EDA.
double fixed_lambda(const ProblemConstants& constants,
                    std::int64_t total_budget);

}  // namespace radar

#endif
