#ifndef RADAR_VALIDATION_HPP
#define RADAR_VALIDATION_HPP

#include <cstdint>

#include "radar/geometry.hpp"
#include "radar/types.hpp"

namespace radar {

// Numerical cross-checks for the closed-form geometry kernels. Everything
// here is deliberately independent of the closed-form algebra: the
// constrained minimizer is found by projected gradient iterations with a
// root-finding Euclidean projection onto the lp ball, never via conjugate
// exponents or the boundary multiplier.

// Objective of the dual-averaging subproblem,
//   eta*<mu, theta> + ||theta - center||_p^2 / (2(p-1)R^2),
// evaluated directly from its definition.
double prox_objective(const DenseVector& theta, const DenseVector& mu,
                      const DenseVector& center, double radius, double eta,
                      double p);

// Euclidean projection of v onto {u : ||u||_p <= radius}, p in (1, 2].
// Guarded-Newton search on the constraint multiplier; accurate to roughly
// machine precision in the active-set equation.
DenseVector project_lp_ball_numeric(const DenseVector& v, double radius,
                                    double p);

// Accelerated projected-gradient minimizer of the dual-averaging
// subproblem; stops when the projected-gradient fixpoint residual falls
// below tol (l2). Used as the oracle that dual_averaging_step is checked
// against.
DenseVector minimize_prox_subproblem(const DenseVector& mu,
                                     const DenseVector& center, double radius,
                                     double eta, double p,
                                     double tol = 1e-10,
                                     int max_iters = 200000);

struct ProxCheckStats {
  int instances = 0;
  double max_linf_gap = 0.0;       // closed form vs numerical minimizer
  double max_objective_gap = 0.0;  // F(closed form) - F(numerical), signed max
  double max_feasibility_excess = 0.0;  // max ||theta-c||_p/R - 1
};

// Runs `count` random instances at dimension d (seeded) through both the
// closed form and the numerical minimizer and accumulates worst-case gaps.
// force_p2 switches the geometry to the p = 2 special case.
ProxCheckStats run_prox_check(int d, int count, std::uint64_t seed,
                              bool force_p2 = false);

// Reference l1-ball projection: monotone bisection on the shrinkage
// threshold, no sorting. Cross-checks project_l1_ball.
DenseVector project_l1_ball_numeric(const DenseVector& v, double radius);

}  // namespace radar

#endif
