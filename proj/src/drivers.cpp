#include "radar/drivers.hpp"

#include <cmath>
#include <utility>

#include "radar/errors.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

AlgorithmKind algorithm_from_name(const std::string& name) {
  if (name == "radar") return AlgorithmKind::radar;
  if (name == "radar_const" || name == "radar-const") {
    return AlgorithmKind::radar_const;
  }
  if (name == "eda") return AlgorithmKind::eda;
  if (name == "rda") return AlgorithmKind::rda;
  if (name == "sgd") return AlgorithmKind::sgd;
  throw validation_error("unknown algorithm '" + name + "'");
}

std::string algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::radar: return "radar";
    case AlgorithmKind::radar_const: return "radar_const";
    case AlgorithmKind::eda: return "eda";
    case AlgorithmKind::rda: return "rda";
    case AlgorithmKind::sgd: return "sgd";
  }
  return "unknown";
}

double fixed_lambda(const ProblemConstants& constants,
                    std::int64_t total_budget) {
  const double eta = std::sqrt(constants.noise_std_sq);
  return 4.0 * eta *
         std::sqrt(constants.log_dim / static_cast<double>(total_budget));
}

namespace {

void validate_config(const GradientOracle& oracle,
                     const AlgorithmConfig& config) {
  if (!(config.r1 > 0.0)) {
    throw validation_error("run: initial radius must be positive");
  }
  if (config.total_budget < 1) {
    throw validation_error("run: total budget must be >= 1");
  }
  if (oracle.instance().d < 3) {
    throw validation_error("run: dimension must be >= 3");
  }
}

RunTrace make_trace(const AlgorithmConfig& config) {
  RunTrace trace;
  trace.stride = config.trace_stride > 0
                     ? config.trace_stride
                     : RunTrace::default_stride(config.total_budget);
  return trace;
}

// Shared epoch chain of the annealed methods. lambda_rule distinguishes
// RADAR (schedule lambda) from EDA (fixed lambda); constant_length > 0
// pins every epoch length, which is how radar_const runs regardless of the
// epoch mode.
enum class LambdaRule { schedule, fixed };

RunResult run_epoch_chain(GradientOracle& oracle,
                          const AlgorithmConfig& config, LambdaRule rule,
                          std::int64_t constant_length) {
  validate_config(oracle, config);
  const LpGeometry geom = LpGeometry::for_dimension(oracle.instance().d);
  const ProblemConstants& constants = config.constants;
  const DenseVector& theta_star = oracle.target();

  RunResult result;
  result.trace = make_trace(config);
  result.plan_used.mode = constant_length > 0
                              ? EpochMode::constant
                              : config.epoch_mode == EpochMode::oracle_halving
                                    ? EpochMode::oracle_halving
                                    : EpochMode::doubling;
  result.plan_used.total_budget = config.total_budget;
  TraceSink sink(result.trace, theta_star, geom);

  const double lambda_fixed = rule == LambdaRule::fixed
                                  ? fixed_lambda(constants, config.total_budget)
                                  : 0.0;
  const bool adaptive = constant_length == 0 &&
                        config.epoch_mode == EpochMode::oracle_halving;

  DenseVector center(static_cast<std::size_t>(oracle.instance().d), 0.0);
  double radius_sq = config.r1 * config.r1;
  std::int64_t remaining = config.total_budget;
  int epoch_index = 1;

  while (remaining > 0) {
    const double radius = std::sqrt(radius_sq);
    // The regularization/step schedule is always the self-consistent pair
    // (theoretical length, lambda at that length): lambda_i then anneals
    // with the radius. Under a constant-length plan only the execution
    // length changes; re-deriving lambda from the shortened epochs would
    // inflate it far past the annealing path.
    const std::int64_t theoretical =
        epoch_length(constants, radius, epoch_index, config.c1);
    const double lambda =
        rule == LambdaRule::fixed
            ? lambda_fixed
            : epoch_lambda(constants, radius, theoretical, epoch_index);
    const double alpha = step_multiplier(constants, radius, lambda);

    std::int64_t cap = std::min(
        constant_length > 0 ? constant_length : theoretical, remaining);
    StopRule stop;
    double entry_error = 0.0;
    if (adaptive) {
      const double overrun = config.halving_overrun_factor *
                             static_cast<double>(theoretical);
      cap = std::min(remaining,
                     static_cast<std::int64_t>(std::ceil(overrun)));
      if (cap < 1) cap = 1;
      entry_error = distance_lp(center, theta_star, geom.p);
      entry_error *= entry_error;
      const double target = entry_error / 2.0;
      stop = [&theta_star, &geom, target](const DenseVector& avg,
                                          std::int64_t) {
        const double err = distance_lp(avg, theta_star, geom.p);
        return err * err <= target;
      };
    } else {
      entry_error = distance_lp(center, theta_star, geom.p);
      entry_error *= entry_error;
    }

    EpochState state = make_epoch_state(center, radius, lambda, alpha);
    sink.begin_epoch(epoch_index, state.center, radius, lambda);
    EpochResult epoch =
        run_epoch(oracle, state, cap, geom, &sink, adaptive ? &stop : nullptr);
    sink.observe(state.theta, sink.global_iteration(), /*force=*/true);

    EpochSpec spec;
    spec.length = epoch.iterations_used;
    spec.radius = radius;
    spec.radius_sq = radius_sq;
    spec.lambda = lambda;
    spec.alpha = alpha;
    result.plan_used.epochs.push_back(spec);

    EpochAudit audit;
    audit.index = epoch_index;
    audit.iterations = epoch.iterations_used;
    audit.radius_sq = radius_sq;
    audit.entry_error_p_sq = entry_error;
    const double exit_dist = distance_lp(epoch.theta_avg, theta_star, geom.p);
    audit.exit_error_p_sq = exit_dist * exit_dist;
    audit.halved = audit.exit_error_p_sq <= entry_error / 2.0;
    audit.force_terminated = adaptive && !audit.halved &&
                             epoch.iterations_used == cap &&
                             remaining > epoch.iterations_used;
    result.epoch_audits.push_back(audit);

    center = std::move(epoch.theta_avg);
    remaining -= epoch.iterations_used;
    radius_sq *= 0.5;
    ++epoch_index;
  }

  result.final_iterate = std::move(center);
  result.epochs_completed = epoch_index - 1;
  result.max_feasibility_ratio = sink.max_feasibility_ratio();
  return result;
}

}  // namespace

RunResult run_radar(GradientOracle& oracle, const AlgorithmConfig& config) {
  return run_epoch_chain(oracle, config, LambdaRule::schedule, 0);
}

RunResult run_radar_const(GradientOracle& oracle,
                          const AlgorithmConfig& config) {
  validate_config(oracle, config);
  // Reuse the plan builder's constant-length rule (budget shorthand, or a
  // logarithmic number of equal epochs when the shorthand is undefined).
  EpochPlan probe = build_plan(config.constants, config.r1,
                               config.total_budget, EpochMode::constant,
                               config.c1);
  return run_epoch_chain(oracle, config, LambdaRule::schedule,
                         probe.epochs.front().length);
}

RunResult run_eda(GradientOracle& oracle, const AlgorithmConfig& config) {
  return run_epoch_chain(oracle, config, LambdaRule::fixed, 0);
}

RunResult run_rda(GradientOracle& oracle, const AlgorithmConfig& config) {
  validate_config(oracle, config);
  const LpGeometry geom = LpGeometry::for_dimension(oracle.instance().d);
  const ProblemConstants& constants = config.constants;

  RunResult result;
  result.trace = make_trace(config);
  result.plan_used.mode = EpochMode::constant;
  result.plan_used.total_budget = config.total_budget;
  TraceSink sink(result.trace, oracle.target(), geom);

  const double lambda = fixed_lambda(constants, config.total_budget);
  const double alpha = step_multiplier(constants, config.r1, lambda);

  DenseVector center(static_cast<std::size_t>(oracle.instance().d), 0.0);
  EpochState state = make_epoch_state(center, config.r1, lambda, alpha);
  sink.begin_epoch(1, state.center, config.r1, lambda);
  EpochResult epoch =
      run_epoch(oracle, state, config.total_budget, geom, &sink);
  sink.observe(state.theta, sink.global_iteration(), /*force=*/true);

  EpochSpec spec;
  spec.length = epoch.iterations_used;
  spec.radius = config.r1;
  spec.radius_sq = config.r1 * config.r1;
  spec.lambda = lambda;
  spec.alpha = alpha;
  result.plan_used.epochs.push_back(spec);

  result.final_iterate = std::move(epoch.theta_avg);
  result.epochs_completed = 1;
  result.max_feasibility_ratio = sink.max_feasibility_ratio();
  return result;
}

RunResult run_sgd(GradientOracle& oracle, const AlgorithmConfig& config) {
  validate_config(oracle, config);
  const LpGeometry geom = LpGeometry::for_dimension(oracle.instance().d);

  RunResult result;
  result.trace = make_trace(config);
  result.plan_used.mode = EpochMode::constant;
  result.plan_used.total_budget = config.total_budget;
  TraceSink sink(result.trace, oracle.target(), geom);

  const double gamma = config.constants.gamma;
  const double step_scale =
      config.sgd_step_scale > 0.0
          ? config.sgd_step_scale
          : (gamma > 0.0 ? 1.0 / gamma : 1.0);

  DenseVector theta(static_cast<std::size_t>(oracle.instance().d), 0.0);
  const DenseVector origin = theta;
  sink.begin_epoch(1, origin, config.r1, 0.0);

  for (std::int64_t t = 1; t <= config.total_budget; ++t) {
    const DenseVector grad = oracle.query(theta);
    axpy(theta, -step_scale / static_cast<double>(t), grad);
    theta = project_l1_ball(theta, config.r1);
    sink.observe(theta, sink.advance());
  }
  sink.observe(theta, sink.global_iteration(), /*force=*/true);

  EpochSpec spec;
  spec.length = config.total_budget;
  spec.radius = config.r1;
  spec.radius_sq = config.r1 * config.r1;
  spec.lambda = 0.0;
  spec.alpha = step_scale;
  result.plan_used.epochs.push_back(spec);

  result.final_iterate = std::move(theta);
  result.epochs_completed = 1;
  result.max_feasibility_ratio = sink.max_feasibility_ratio();
  return result;
}

RunResult run_algorithm(GradientOracle& oracle,
                        const AlgorithmConfig& config) {
  switch (config.kind) {
    case AlgorithmKind::radar: return run_radar(oracle, config);
    case AlgorithmKind::radar_const: return run_radar_const(oracle, config);
    case AlgorithmKind::eda: return run_eda(oracle, config);
    case AlgorithmKind::rda: return run_rda(oracle, config);
    case AlgorithmKind::sgd: return run_sgd(oracle, config);
  }
  throw validation_error("run_algorithm: unknown algorithm kind");
}

}  // namespace radar
