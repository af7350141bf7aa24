#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "radar/errors.hpp"
#include "radar/schedule.hpp"

using namespace radar;

namespace {

// Radius-free constants (Lipschitz-style loss).
ProblemConstants lipschitz_constants(double g, double sigma, double gamma,
                                     double log_dim, int s, double omega) {
  ProblemConstants constants;
  constants.loss = LossKind::logistic;
  constants.lipschitz_g = g;
  constants.noise_sigma = sigma;
  constants.gamma = gamma;
  constants.log_dim = log_dim;
  constants.sparsity = s;
  constants.omega = omega;
  return constants;
}

ProblemConstants ls_problem(double b, double eta_sq, double gamma,
                            double log_dim, int s, double omega) {
  ProblemConstants constants;
  constants.loss = LossKind::least_squares;
  constants.covariate_bound = b;
  constants.noise_std_sq = eta_sq;
  constants.gamma = gamma;
  constants.log_dim = log_dim;
  constants.sparsity = s;
  constants.omega = omega;
  return constants;
}

}  // namespace

TEST_CASE("effective rsc") {
  CHECK(effective_rsc(1.0, 0.0, 10) == 1.0);  // tolerance-free
  CHECK(effective_rsc(1.0, 0.01, 5) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(effective_rsc(1.0, 0.01, 7), validation_error);
}

TEST_CASE("omega_i") {
  CHECK(omega_i(1.5, 1.0) == 1.5);  // ln 1 = 0
  CHECK(omega_i(0.0, std::exp(1.0)) ==
        doctest::Approx(std::sqrt(24.0)).epsilon(1e-12));
  // monotone nondecreasing in the epoch index
  double previous = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double value = omega_i(0.7, i);
    CHECK(value >= previous);
    previous = value;
  }
  CHECK_THROWS_AS(omega_i(1.0, 0.5), validation_error);
}

TEST_CASE("epoch length hand value and floor") {
  const ProblemConstants constants =
      lipschitz_constants(1.0, 1.0, 1.0, 3.0, 1, 0.0);
  CHECK(epoch_length(constants, 1.0, 1, 1.0) == 9);

  // additive ln d floor: lengths never drop below c1 ln d
  for (double radius : {0.5, 2.0, 64.0, 4096.0}) {
    CHECK(epoch_length(constants, radius, 1, 1.0) >= 3);
  }
  CHECK_THROWS_AS(epoch_length(constants, -1.0, 1, 1.0), validation_error);
  // the zero-radius limit saturates instead of overflowing
  CHECK(epoch_length(constants, 0.0, 1, 1.0) >= (std::int64_t{1} << 60));
}

TEST_CASE("epoch length approaches doubling as the radius term dominates") {
  // sigma = 0 removes the omega_i drift, isolating the 1/R^2 growth
  const ProblemConstants constants =
      lipschitz_constants(1.0, 0.0, 1.0, std::log(200.0), 3, 1.0);
  double radius = 1.0;
  std::int64_t previous = epoch_length(constants, radius, 1, 1.0);
  for (int i = 2; i <= 12; ++i) {
    radius /= std::sqrt(2.0);
    const std::int64_t current = epoch_length(constants, radius, i, 1.0);
    const double ratio =
        static_cast<double>(current) / static_cast<double>(previous);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
    previous = current;
  }
}

TEST_CASE("epoch lambda hand value and scaling invariance") {
  const ProblemConstants constants =
      lipschitz_constants(1.0, 0.0, 1.0, 1.0, 1, 0.0);
  CHECK(epoch_lambda(constants, 1.0, 1, 1) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // doubling R and quadrupling T leaves lambda^2 unchanged
  const double lambda_base = epoch_lambda(constants, 1.0, 100, 1);
  const double lambda_scaled = epoch_lambda(constants, 2.0, 400, 1);
  CHECK(lambda_base == doctest::Approx(lambda_scaled).epsilon(1e-12));

  CHECK_THROWS_AS(epoch_lambda(constants, 1.0, 0, 1), validation_error);
}

TEST_CASE("step multiplier hand value and linear radius scaling") {
  const ProblemConstants constants =
      lipschitz_constants(5.0, 0.0, 1.0, 1.0, 1, 0.0);
  // G^2 + lambda^2 + sigma^2 = 25 ln d with R = 1 gives alpha = 1
  CHECK(step_multiplier(constants, 1.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(step_multiplier(constants, 3.0, 0.0) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("kappa_T hand value and log identities") {
  const ProblemConstants constants =
      lipschitz_constants(1.0, 0.0, 1.0, 1.0, 1, 0.0);
  CHECK(kappa_T(constants, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  // doubling T adds exactly ln d to kappa
  const ProblemConstants wide =
      lipschitz_constants(1.0, 0.5, 0.8, std::log(500.0), 2, 1.0);
  const double base = kappa_T(wide, 40.0, 100000);
  const double doubled = kappa_T(wide, 40.0, 200000);
  CHECK(doubled - base == doctest::Approx(wide.log_dim).epsilon(1e-10));

  CHECK_THROWS_AS(kappa_T(constants, 1.0, 1), computation_error);
}

TEST_CASE("least-squares constants") {
  const auto [g, sigma] = ls_constants(1.0, 0.5, 1.0);
  CHECK(g == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sigma == doctest::Approx(std::sqrt(42.0)).epsilon(1e-12));

  // sigma^2 grows quadratically in R once noise is negligible
  const auto [g2, sigma2] = ls_constants(1.0, 0.0, 2.0);
  const auto [g4, sigma4] = ls_constants(1.0, 0.0, 4.0);
  CHECK(sigma4 / sigma2 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g4 / g2 == doctest::Approx(2.0).epsilon(1e-12));

  // limits: both collapse as R -> 0 with eta = 0
  const auto [g0, sigma0] = ls_constants(1.0, 0.0, 1e-9);
  CHECK(g0 < 1e-8);
  CHECK(sigma0 < 1e-7);
}

TEST_CASE("logistic constants") {
  const LogisticConstants at_zero = logistic_constants(1.0, 0.0, 1.0 / 3.0);
  CHECK(at_zero.g == 1.0);
  CHECK(at_zero.sigma == 2.0);
  CHECK(at_zero.gamma == doctest::Approx(1.0 / 12.0).epsilon(1e-12));

  // sigma / G = 2 always
  for (double b : {0.5, 1.0, 3.0}) {
    const LogisticConstants c = logistic_constants(b, 2.0, 0.7);
    CHECK(c.sigma / c.g == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(logistic_constants(0.0, 1.0, 1.0), validation_error);
}

TEST_CASE("approximation error") {
  // supported target has zero error
  CHECK(approx_error({1.0, 0.0, -2.0}, {0, 2}, 0.0, 1.0) == 0.0);
  CHECK(approx_error({1.0, 0.5}, {0}, 0.0, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // tau > 0 strictly increases the value
  CHECK(approx_error({1.0, 0.5}, {0}, 0.1, 1.0) >
        approx_error({1.0, 0.5}, {0}, 0.0, 1.0));
  CHECK_THROWS_AS(approx_error({1.0}, {}, 0.0, 1.0), validation_error);
  CHECK_THROWS_AS(approx_error({1.0}, {3}, 0.0, 1.0), validation_error);
}

TEST_CASE("tolerant-path schedules use the effective curvature") {
  ProblemConstants constants =
      lipschitz_constants(1.0, 1.0, 1.0, std::log(50.0), 2, 1.0);
  constants.tau = 0.005;  // gamma_bar = 1 - 16*2*0.005 = 0.84
  const std::int64_t tolerant = epoch_length(constants, 1.0, 1, 1.0);
  constants.tau = 0.0;
  const std::int64_t plain = epoch_length(constants, 1.0, 1, 1.0);
  // weaker curvature and the larger prox bound both lengthen epochs
  CHECK(tolerant > plain);

  constants.tau = 0.005;
  const double lambda_tolerant = epoch_lambda(constants, 1.0, 100, 1);
  CHECK(std::isfinite(lambda_tolerant));
  CHECK(lambda_tolerant > 0.0);
}

TEST_CASE("doubling plan: exact radius halving, budget conservation") {
  // sigma = 0 keeps lambda_i strictly proportional to R_i
  const ProblemConstants constants =
      lipschitz_constants(1.0, 0.0, 1.0, std::log(100.0), 2, 1.0);
  const std::int64_t budget = 100000;
  const EpochPlan plan =
      build_plan(constants, 4.0, budget, EpochMode::doubling, 1.0);

  REQUIRE(plan.epochs.size() >= 3);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < plan.epochs.size(); ++i) {
    total += plan.epochs[i].length;
    if (i + 1 < plan.epochs.size()) {
      // bit-exact squared-radius halving
      CHECK(plan.epochs[i + 1].radius_sq == plan.epochs[i].radius_sq * 0.5);
      CHECK(plan.epochs[i + 1].lambda <= plan.epochs[i].lambda);
    }
  }
  CHECK(total == budget);

  // epoch 5 radius is R1/4
  if (plan.epochs.size() >= 5) {
    CHECK(plan.epochs[4].radius == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lambda^2 tracks R^2 across the doubling schedule") {
  // small gamma makes the s^2 term dominate the additive ln d floor, the
  // regime where lambda^2 / R^2 is schedule-invariant up to rounding and
  // the omega_i drift
  const ProblemConstants constants =
      lipschitz_constants(1.0, 1.0, 0.05, std::log(150.0), 3, 1.0);
  const EpochPlan plan =
      build_plan(constants, 2.0, 2000000, EpochMode::doubling, 1.0);
  REQUIRE(plan.epochs.size() >= 4);
  const double base =
      plan.epochs[0].lambda * plan.epochs[0].lambda / plan.epochs[0].radius_sq;
  for (const EpochSpec& epoch : plan.epochs) {
    const double ratio = epoch.lambda * epoch.lambda / epoch.radius_sq;
    CHECK(std::fabs(ratio / base - 1.0) < 0.1);
  }
}

TEST_CASE("constant plan: equal lengths with ln T fallback") {
  const ProblemConstants constants =
      ls_problem(1.0, 0.5, 1.0 / 3.0, std::log(1000.0), 7, 2.63);
  // budget too small for the kappa shorthand -> ceil(ln T) equal epochs
  const EpochPlan plan =
      build_plan(constants, 7.0, 20000, EpochMode::constant, 1.0);
  const std::int64_t expected_len = static_cast<std::int64_t>(
      std::ceil(20000.0 / std::ceil(std::log(20000.0))));
  for (std::size_t i = 0; i + 1 < plan.epochs.size(); ++i) {
    CHECK(plan.epochs[i].length == expected_len);
  }
  CHECK(plan.epochs.back().length <= expected_len);

  // generous budget and mild constants -> kappa path, still equal lengths
  const ProblemConstants mild =
      lipschitz_constants(0.1, 0.1, 1.0, std::log(1000.0), 1, 0.0);
  const EpochPlan kappa_plan =
      build_plan(mild, 10.0, 100000, EpochMode::constant, 1.0);
  const double kappa = kappa_T(mild, 10.0, 100000);
  const std::int64_t want = std::max(
      static_cast<std::int64_t>(std::ceil(100000.0 * mild.log_dim / kappa)),
      static_cast<std::int64_t>(std::ceil(std::log(100000.0))));
  for (std::size_t i = 0; i + 1 < kappa_plan.epochs.size(); ++i) {
    CHECK(kappa_plan.epochs[i].length == want);
  }
}

TEST_CASE("plan handles a budget smaller than one epoch") {
  const ProblemConstants constants =
      lipschitz_constants(1.0, 1.0, 1.0, std::log(100.0), 2, 1.0);
  const EpochPlan plan =
      build_plan(constants, 1.0, 10, EpochMode::doubling, 1.0);
  REQUIRE(plan.epochs.size() == 1);
  CHECK(plan.epochs[0].length == 10);
}

TEST_CASE("least-squares schedules evaluate constants at twice the radius") {
  const ProblemConstants constants =
      ls_problem(1.0, 0.5, 1.0 / 3.0, std::log(1000.0), 7, 0.0);
  const auto [g, sigma] = constants.epoch_g_sigma(7.0);
  const auto [g_direct, sigma_direct] = ls_constants(1.0, 0.5, 14.0);
  CHECK(g == g_direct);
  CHECK(sigma == sigma_direct);
}

TEST_CASE("plan csv serialization") {
  const ProblemConstants constants =
      lipschitz_constants(1.0, 1.0, 1.0, std::log(100.0), 2, 1.0);
  const EpochPlan plan =
      build_plan(constants, 2.0, 5000, EpochMode::doubling, 0.01);
  const std::string csv = plan.to_csv();
  CHECK(csv.rfind("epoch_index,T_i,R_i,lambda_i,alpha_i\n", 0) == 0);
  // one line per epoch plus header
  std::size_t lines = 0;
  for (char c : csv) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == plan.epochs.size() + 1);
}
