#include "radar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "radar/errors.hpp"
#include "radar/vector_ops.hpp"

namespace radar {

std::pair<double, double> conjugate_exponents(int d) {
  if (d < 3) {
    throw validation_error("conjugate_exponents: dimension must be >= 3, got " +
                           std::to_string(d));
  }
  const double two_log_d = 2.0 * std::log(static_cast<double>(d));
  return {two_log_d / (two_log_d - 1.0), two_log_d};
}

LpGeometry LpGeometry::for_dimension(int d) {
  const auto [p, q] = conjugate_exponents(d);
  LpGeometry geom;
  geom.d = d;
  geom.p = p;
  geom.q = q;
  geom.a_prox = std::exp(1.0) * std::log(static_cast<double>(d));
  return geom;
}

LpGeometry LpGeometry::with_exponent(int d, double p) {
  if (d < 1) {
    throw validation_error("LpGeometry: dimension must be positive");
  }
  if (!(p > 1.0 && p <= 2.0)) {
    throw validation_error("LpGeometry: exponent must lie in (1, 2]");
  }
  LpGeometry geom;
  geom.d = d;
  geom.p = p;
  geom.q = p / (p - 1.0);
  geom.a_prox = std::exp(1.0) * std::log(static_cast<double>(std::max(d, 3)));
  return geom;
}

double prox_value(const DenseVector& theta, const DenseVector& center,
                  double radius, const LpGeometry& geom) {
  if (radius <= 0.0) {
    throw validation_error("prox_value: radius must be positive");
  }
  check_same_size(theta, center, "prox_value");
  const double dist = distance_lp(theta, center, geom.p);
  return dist * dist / (2.0 * (geom.p - 1.0) * radius * radius);
}

DenseVector dual_averaging_step(const DenseVector& mu,
                                const DenseVector& center, double radius,
                                double eta, const LpGeometry& geom) {
  check_same_size(mu, center, "dual_averaging_step");
  if (radius < 0.0) {
    throw validation_error("dual_averaging_step: radius must be nonnegative");
  }
  if (eta < 0.0) {
    throw validation_error("dual_averaging_step: step must be nonnegative");
  }
  // Degenerate limits: a zero-radius ball pins the iterate at the center,
  // a zero step minimizes the prox term alone.
  if (radius == 0.0 || eta == 0.0) return center;

  const double mu_max = linf_norm(mu);
  if (mu_max == 0.0) return center;  // no dual signal

  const double p = geom.p;
  const double q = geom.q;

  // Coordinates far below the max contribute powers many orders below any
  // tolerance in play; dropping them avoids the subnormal-result slow path
  // of pow, which otherwise dominates the runtime at large q.
  const double cutoff = std::exp(-64.0 / (q - 1.0));

  // ||mu||_q scaled by the max entry; ratios stay in [0, 1] so the q-th
  // powers cannot overflow even for large q.
  double ratio_sum = 0.0;
  for (double m : mu) {
    const double ratio = std::fabs(m) / mu_max;
    if (ratio > cutoff) ratio_sum += pos_pow(ratio, q);
  }
  const double mu_qnorm = mu_max * pos_pow(ratio_sum, 1.0 / q);

  const double xi = std::max(0.0, (p - 1.0) * eta * mu_qnorm * radius - 1.0);

  // Per-coordinate magnitude:
  //   (p-1) R^2 eta/(1+xi) * |mu_j|^(q-1) * ||mu||_q^(2-q)
  // evaluated as coef * (|mu_j|/||mu||_q)^(q-1) with coef carrying one
  // factor of ||mu||_q, so no large-exponent blowup.
  const double coef =
      (p - 1.0) * radius * radius * eta / (1.0 + xi) * mu_qnorm;

  DenseVector theta(center.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double ratio = std::fabs(mu[j]) / mu_qnorm;
    if (ratio <= cutoff) {
      theta[j] = center[j];
      continue;
    }
    const double magnitude = coef * pos_pow(ratio, q - 1.0);
    theta[j] = center[j] - std::copysign(magnitude, mu[j]);
  }
  return theta;
}

DenseVector l1_subgradient(const DenseVector& theta) {
  DenseVector v(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    v[j] = (theta[j] > 0.0) ? 1.0 : (theta[j] < 0.0 ? -1.0 : 0.0);
  }
  return v;
}

DenseVector project_l1_ball(const DenseVector& theta, double radius) {
  if (radius <= 0.0) {
    throw validation_error("project_l1_ball: radius must be positive");
  }
  if (l1_norm(theta) <= radius) return theta;

  // Threshold search on the sorted magnitudes: the projection is the soft
  // threshold sign(x) max(|x| - tau, 0) with tau chosen so the result has
  // l1 norm exactly radius.
  DenseVector mags(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) mags[j] = std::fabs(theta[j]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  double running = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    running += mags[j];
    const double candidate = (running - radius) / static_cast<double>(j + 1);
    if (mags[j] > candidate) tau = candidate;
  }

  DenseVector out(theta.size());
  std::size_t live = 0;
  auto apply_threshold = [&]() {
    live = 0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double shrunk = std::fabs(theta[j]) - tau;
      if (shrunk > 0.0) {
        out[j] = std::copysign(shrunk, theta[j]);
        ++live;
      } else {
        out[j] = 0.0;
      }
    }
  };
  apply_threshold();
  // Rounding can leave the result slightly outside the ball, which would
  // break exact idempotence. Raise the threshold by the per-coordinate
  // excess (at least one ulp) until the result passes this function's own
  // feasibility test; this settles in a step or two.
  for (int guard = 0; guard < 200; ++guard) {
    const double excess = l1_norm(out) - radius;
    if (excess <= 0.0 || live == 0) break;
    const double bumped = tau + excess / static_cast<double>(live);
    tau = std::max(
        bumped, std::nextafter(tau, std::numeric_limits<double>::infinity()));
    apply_threshold();
  }
  return out;
}

}  // namespace radar
