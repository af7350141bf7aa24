#ifndef RADAR_GEOMETRY_HPP
#define RADAR_GEOMETRY_HPP

#include <utility>

#include "radar/types.hpp"

namespace radar {

// The lp geometry used by every dual-averaging kernel. For dimension d the
// prox exponent is p = 2 ln d / (2 ln d - 1), its conjugate is q = 2 ln d,
// and the prox function ||theta - c||_p^2 / (2(p-1)R^2) is then strongly
// convex with respect to the l1 norm, with value bound a_prox = e ln d over
// the unit l1 ball.
struct LpGeometry {
  int d = 0;
  double p = 0.0;
  double q = 0.0;
  double a_prox = 0.0;

  // Standard geometry for dimension d (requires d >= 3 so that p <= 2).
  static LpGeometry for_dimension(int d);

  // Geometry with an explicitly forced exponent (q = p/(p-1)); used by
  // verification harnesses, e.g. p = 2 turns the kernel into a Euclidean
  // ball update with hand-checkable values.
  static LpGeometry with_exponent(int d, double p);
};

// (p, q) for dimension d; throws validation_error if d < 3.
std::pair<double, double> conjugate_exponents(int d);

// psi_{center,radius}(theta) = ||theta - center||_p^2 / (2(p-1) radius^2).
double prox_value(const DenseVector& theta, const DenseVector& center,
                  double radius, const LpGeometry& geom);

// Exact minimizer of  eta*<mu, theta> + psi_{center,radius}(theta)  over the
// ball ||theta - center||_p <= radius, computed in closed form in O(d):
//
//   theta = center - [(p-1) R^2 eta / (1+xi)] |mu|^(q-1) sign(mu) ||mu||_q^(2-q)
//   xi    = max{0, (p-1) eta ||mu||_q R - 1}
//
// When xi > 0 the constraint binds and ||theta - center||_p = R exactly.
// mu = 0 returns center.
DenseVector dual_averaging_step(const DenseVector& mu,
                                const DenseVector& center, double radius,
                                double eta, const LpGeometry& geom);

// Elementwise sign of theta, 0 for zero entries; a member of the l1
// subdifferential at theta.
DenseVector l1_subgradient(const DenseVector& theta);

// Euclidean projection onto {x : ||x||_1 <= radius}; sort-based threshold
// search, O(d log d). Feasible inputs are returned unchanged.
DenseVector project_l1_ball(const DenseVector& theta, double radius);

}  // namespace radar

#endif
