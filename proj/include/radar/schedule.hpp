#ifndef RADAR_SCHEDULE_HPP
#define RADAR_SCHEDULE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "radar/types.hpp"

namespace radar {

// Assumption-level constants of the optimization problem. For a globally
// Lipschitz loss, lipschitz_g / noise_sigma are the radius-free constants;
// for least squares they are derived from (B, eta^2) through the radius
// rule G(R) = (B^2/3) R, sigma^2(R) = 24 B^4 R^2 + 36 B^2 eta^2, and every
// schedule quantity evaluates them at twice the epoch radius.
struct ProblemConstants {
  LossKind loss = LossKind::least_squares;
  double log_dim = 0.0;       // ln d
  double gamma = 0.0;         // strong convexity constant
  double tau = 0.0;           // RSC tolerance
  int sparsity = 1;           // s
  double omega = 0.0;         // confidence parameter
  double covariate_bound = 1.0;   // B
  double noise_std_sq = 0.5;      // eta^2 (least squares observation noise)
  double cov_min_eig = 0.0;       // sigma_min(Sigma)
  double lipschitz_g = 0.0;       // radius-free G (Lipschitz losses)
  double noise_sigma = 0.0;       // radius-free sigma (Lipschitz losses)

  double a_prox() const;  // e * ln d

  // (G_i, sigma_i) used by the schedules in an epoch of radius R_i:
  // the least-squares rule evaluates at 2 R_i, Lipschitz losses are
  // radius-free.
  std::pair<double, double> epoch_g_sigma(double radius) const;
};

enum class EpochMode {
  doubling,        // theoretical lengths, doubling as R_i^2 halves
  constant,        // fixed length from the budget shorthand
  oracle_halving,  // lengths decided by the driver's halving rule
};

struct EpochSpec {
  std::int64_t length = 0;   // T_i
  double radius = 0.0;       // R_i
  double radius_sq = 0.0;    // R_i^2 (halved exactly between epochs)
  double lambda = 0.0;       // lambda_i
  double alpha = 0.0;        // step multiplier alpha_i
};

struct EpochPlan {
  EpochMode mode = EpochMode::doubling;
  std::vector<EpochSpec> epochs;
  std::int64_t total_budget = 0;

  // CSV audit dump: epoch_index,T_i,R_i,lambda_i,alpha_i.
  std::string to_csv() const;
};

// Effective curvature gamma_bar = gamma - 16 s tau; throws when the
// sparsity/tolerance combination destroys convexity.
double effective_rsc(double gamma, double tau, int s);

// omega_i = sqrt(omega^2 + 24 ln i). Accepts a real-valued index >= 1.
double omega_i(double omega, double epoch_index);

// Epoch length T_i = ceil(c1 [ s^2/(gamma^2 R^2) ((G_i^2 + sigma_i^2) L +
// omega_i^2 sigma_i^2) + L ]) with L = ln d when tau = 0. When tau > 0 the
// tolerant variant is used: the prox bound a_prox replaces ln d, the
// curvature ratio gamma^2/gamma_bar^4 replaces 1/gamma^2, and the additive
// floor becomes gamma a_prox / gamma_bar.
std::int64_t epoch_length(const ProblemConstants& constants, double radius,
                          int epoch_index, double c1);

// lambda_i^2 = (R gamma / (s sqrt(T_i))) sqrt((G_i^2 + sigma_i^2) L +
// omega_i^2 sigma_i^2), with (gamma, L) -> (gamma_bar, a_prox) when tau > 0.
double epoch_lambda(const ProblemConstants& constants, double radius,
                    std::int64_t epoch_length, int epoch_index);

// alpha_i = 5 R sqrt(L / (G_i^2 + lambda_i^2 + sigma_i^2)); the in-epoch
// step at iteration t is alpha_i / sqrt(t).
double step_multiplier(const ProblemConstants& constants, double radius,
                       double lambda);

// kappa_T = log2[gamma^2 R1^2 T / (s^2 ((G^2+sigma^2) ln d + omega^2
// sigma^2))] * ln d; throws computation_error when the budget is too small
// for the argument to exceed one.
double kappa_T(const ProblemConstants& constants, double r1, std::int64_t T);

// Least-squares constants at radius R: G = (B^2/3) R and
// sigma = sqrt(24 B^4 R^2 + 36 B^2 eta^2).
std::pair<double, double> ls_constants(double b, double eta_sq, double radius);

struct LogisticConstants {
  double g = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
};

// Logistic-loss constants: G = B, sigma = 2B, gamma = s''(B R1) sigma_min
// with s'' the logistic sigmoid curvature exp(a)/(1+exp(a))^2.
LogisticConstants logistic_constants(double b, double r1, double cov_min_eig);

// Approximation error of theta_star relative to a support set:
// (||theta_star restricted off S||_1^2 / |S|) * (1 + |S| tau / gamma_bar).
double approx_error(const DenseVector& theta_star,
                    const std::vector<int>& support, double tau,
                    double gamma_bar);

// Builds the full epoch plan for a budget of T iterations starting at
// radius r1. Doubling mode plans theoretical lengths until the budget is
// exhausted (last epoch truncated); constant mode uses the fixed length
// max(ceil(T ln d / kappa_T), ceil(ln T)), falling back to ceil(ln T) when
// kappa_T is undefined at this budget; oracle_halving leaves lengths to the
// driver and only pins radii, lambdas and steps per epoch.
EpochPlan build_plan(const ProblemConstants& constants, double r1,
                     std::int64_t total_budget, EpochMode mode, double c1);

}  // namespace radar

#endif
