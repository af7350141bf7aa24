#include "radar/schedule.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "radar/errors.hpp"
#include "radar/format.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

double ProblemConstants::a_prox() const {
  return std::exp(1.0) * log_dim;
}

std::pair<double, double> ProblemConstants::epoch_g_sigma(
    double radius) const {
  if (loss == LossKind::least_squares) {
    return ls_constants(covariate_bound, noise_std_sq, 2.0 * radius);
  }
  return {lipschitz_g, noise_sigma};
}

double effective_rsc(double gamma, double tau, int s) {
  const double bar = gamma - 16.0 * static_cast<double>(s) * tau;
  if (!(bar > 0.0)) {
    throw validation_error(
        "effective_rsc: gamma - 16 s tau must be positive (got " +
        format_double(bar) + ")");
  }
  return bar;
}

double omega_i(double omega, double epoch_index) {
  if (!(epoch_index >= 1.0)) {
    throw validation_error("omega_i: epoch index must be >= 1");
  }
  return std::sqrt(omega * omega + 24.0 * std::log(epoch_index));
}

namespace {

// The schedules come in two flavors sharing one shape: the tolerance-free
// one pairs (gamma, ln d), the tolerant one pairs (gamma_bar, a_prox) with
// an extra curvature ratio in the epoch length. Resolved once here.
struct ScheduleParams {
  double curvature = 0.0;   // gamma or gamma_bar
  double log_term = 0.0;    // ln d or a_prox
  double gamma_raw = 0.0;   // gamma (only the tolerant length needs both)
};

ScheduleParams resolve(const ProblemConstants& constants) {
  ScheduleParams params;
  params.gamma_raw = constants.gamma;
  if (constants.tau > 0.0) {
    params.curvature =
        effective_rsc(constants.gamma, constants.tau, constants.sparsity);
    params.log_term = constants.a_prox();
  } else {
    params.curvature = constants.gamma;
    params.log_term = constants.log_dim;
  }
  return params;
}

}  // namespace

std::int64_t epoch_length(const ProblemConstants& constants, double radius,
                          int epoch_index, double c1) {
  if (radius < 0.0) {
    throw validation_error("epoch_length: radius must be nonnegative");
  }
  const auto [g_i, sigma_i] = constants.epoch_g_sigma(radius);
  const double w_i = omega_i(constants.omega, epoch_index);
  const ScheduleParams params = resolve(constants);
  const double s = static_cast<double>(constants.sparsity);

  const double noise_mass = (g_i * g_i + sigma_i * sigma_i) * params.log_term +
                            w_i * w_i * sigma_i * sigma_i;
  double value;
  if (constants.tau > 0.0) {
    const double bar = params.curvature;
    value = c1 * (s * s * params.gamma_raw * params.gamma_raw /
                      (bar * bar * bar * bar * radius * radius) * noise_mass +
                  params.gamma_raw * params.log_term / bar);
  } else {
    value = c1 * (s * s / (params.curvature * params.curvature * radius *
                           radius) * noise_mass +
                  params.log_term);
  }
  const double rounded = std::ceil(value);
  if (rounded < 1.0) return 1;
  // The formula diverges as the radius collapses; saturate so callers can
  // min() against their remaining budget.
  constexpr double kMax = 4.0e18;
  if (!(rounded < kMax)) return static_cast<std::int64_t>(kMax);
  return static_cast<std::int64_t>(rounded);
}

double epoch_lambda(const ProblemConstants& constants, double radius,
                    std::int64_t epoch_length, int epoch_index) {
  if (epoch_length < 1) {
    throw validation_error("epoch_lambda: epoch length must be >= 1");
  }
  if (radius < 0.0) {
    throw validation_error("epoch_lambda: radius must be nonnegative");
  }
  if (radius == 0.0) return 0.0;
  const auto [g_i, sigma_i] = constants.epoch_g_sigma(radius);
  const double w_i = omega_i(constants.omega, epoch_index);
  const ScheduleParams params = resolve(constants);
  const double s = static_cast<double>(constants.sparsity);

  const double noise_mass = (g_i * g_i + sigma_i * sigma_i) * params.log_term +
                            w_i * w_i * sigma_i * sigma_i;
  const double lambda_sq = radius * params.curvature /
                           (s * std::sqrt(static_cast<double>(epoch_length))) *
                           std::sqrt(noise_mass);
  return std::sqrt(lambda_sq);
}

double step_multiplier(const ProblemConstants& constants, double radius,
                       double lambda) {
  if (radius < 0.0) {
    throw validation_error("step_multiplier: radius must be nonnegative");
  }
  const auto [g_i, sigma_i] = constants.epoch_g_sigma(radius);
  const ScheduleParams params = resolve(constants);
  const double denom = g_i * g_i + lambda * lambda + sigma_i * sigma_i;
  return 5.0 * radius * std::sqrt(params.log_term / denom);
}

double kappa_T(const ProblemConstants& constants, double r1, std::int64_t T) {
  const auto [g, sigma] = constants.epoch_g_sigma(r1);
  const double s = static_cast<double>(constants.sparsity);
  const double omega_sq = constants.omega * constants.omega;
  const double denom =
      s * s * ((g * g + sigma * sigma) * constants.log_dim +
               omega_sq * sigma * sigma);
  const double arg = constants.gamma * constants.gamma * r1 * r1 *
                     static_cast<double>(T) / denom;
  if (!(arg > 1.0)) {
    throw computation_error("kappa_T: budget too small (log2 argument " +
                            format_double(arg) + " <= 1)");
  }
  return std::log2(arg) * constants.log_dim;
}

std::pair<double, double> ls_constants(double b, double eta_sq,
                                       double radius) {
  if (radius < 0.0) {
    throw validation_error("ls_constants: radius must be nonnegative");
  }
  const double g = b * b / 3.0 * radius;
  const double sigma = std::sqrt(24.0 * b * b * b * b * radius * radius +
                                 36.0 * b * b * eta_sq);
  return {g, sigma};
}

LogisticConstants logistic_constants(double b, double r1,
                                     double cov_min_eig) {
  if (!(b > 0.0)) {
    throw validation_error("logistic_constants: B must be positive");
  }
  const double a = b * r1;
  // exp(a)/(1+exp(a))^2 evaluated as sigmoid(a)*sigmoid(-a).
  const double sig = 1.0 / (1.0 + std::exp(-a));
  const double curvature = sig * (1.0 - sig);
  return {b, 2.0 * b, curvature * cov_min_eig};
}

double approx_error(const DenseVector& theta_star,
                    const std::vector<int>& support, double tau,
                    double gamma_bar) {
  if (support.empty()) {
    throw validation_error("approx_error: support set is empty");
  }
  std::vector<bool> on_support(theta_star.size(), false);
  for (int idx : support) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= theta_star.size()) {
      throw validation_error("approx_error: support index out of range");
    }
    on_support[static_cast<std::size_t>(idx)] = true;
  }
  double off_l1 = 0.0;
  for (std::size_t j = 0; j < theta_star.size(); ++j) {
    if (!on_support[j]) off_l1 += std::fabs(theta_star[j]);
  }
  const double s = static_cast<double>(support.size());
  double value = off_l1 * off_l1 / s;
  if (tau > 0.0) {
    if (!(gamma_bar > 0.0)) {
      throw validation_error("approx_error: gamma_bar must be positive");
    }
    value *= 1.0 + s * tau / gamma_bar;
  }
  return value;
}

EpochPlan build_plan(const ProblemConstants& constants, double r1,
                     std::int64_t total_budget, EpochMode mode, double c1) {
  if (total_budget < 1) {
    throw validation_error("build_plan: budget must be >= 1");
  }
  if (!(r1 > 0.0)) {
    throw validation_error("build_plan: initial radius must be positive");
  }

  EpochPlan plan;
  plan.mode = mode;
  plan.total_budget = total_budget;

  std::int64_t constant_length = 0;
  if (mode == EpochMode::constant) {
    // Fallback when the budget shorthand is undefined: a logarithmic
    // number of equal epochs, T_i = T / ceil(ln T). (A fixed length of
    // ceil(ln T) would halve the radius once per handful of iterations
    // and freeze the run long before the budget is spent.)
    const std::int64_t log_t = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::ceil(std::log(static_cast<double>(total_budget)))));
    const std::int64_t log_count_length = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(total_budget) /
                  static_cast<double>(log_t)));
    try {
      const double kappa = kappa_T(constants, r1, total_budget);
      const std::int64_t from_kappa = static_cast<std::int64_t>(std::ceil(
          static_cast<double>(total_budget) * constants.log_dim / kappa));
      constant_length = std::max(from_kappa, log_t);
    } catch (const computation_error&) {
      constant_length = log_count_length;
    }
    if (constant_length < 1) constant_length = 1;
  }

  double radius_sq = r1 * r1;
  std::int64_t consumed = 0;
  int epoch_index = 1;
  while (consumed < total_budget) {
    EpochSpec spec;
    spec.radius_sq = radius_sq;
    spec.radius = std::sqrt(radius_sq);

    const std::int64_t theoretical =
        (mode == EpochMode::constant)
            ? constant_length
            : epoch_length(constants, spec.radius, epoch_index, c1);
    // lambda/alpha always come from the theoretical length; budget
    // truncation only shortens execution.
    spec.lambda =
        epoch_lambda(constants, spec.radius, theoretical, epoch_index);
    spec.alpha = step_multiplier(constants, spec.radius, spec.lambda);
    spec.length = std::min(theoretical, total_budget - consumed);

    consumed += spec.length;
    plan.epochs.push_back(spec);

    radius_sq *= 0.5;  // exact halving of the squared radius
    ++epoch_index;
    if (mode == EpochMode::oracle_halving && consumed >= total_budget) break;
  }
  return plan;
}

std::string EpochPlan::to_csv() const {
  std::ostringstream out;
  out << "epoch_index,T_i,R_i,lambda_i,alpha_i\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const EpochSpec& e = epochs[i];
    out << (i + 1) << ',' << e.length << ',' << format_double(e.radius) << ','
        << format_double(e.lambda) << ',' << format_double(e.alpha) << '\n';
  }
  return out.str();
}

}  // namespace radar
