#pragma once

#include "rotnft/drops.hpp"

namespace rotnft {

// u_omega(t) = r(omega t): the drop generator traversed at angular velocity
// omega (signed, nonzero).
struct RotationalControl {
  DropCurve base;
  double omega = 0.0;

  Vector2d operator()(double t) const { return base.r(omega * t); }
  double period() const { return base.period / std::abs(omega); }

  // First iterated integral, exact through the primitive drop:
  // U(t) = R(omega t) / omega.
  Vector2d first_integral(double t) const { return base.R(omega * t) / omega; }
};

RotationalControl make_rotational(const DropCurve& base, double omega);

// First and second iterated integrals of a rotational control on a time grid,
// with symmetric/antisymmetric parts. Whole periods are accumulated in closed
// form; only the in-period remainder is integrated numerically.
struct IteratedIntegrals {
  std::vector<double> t;
  std::vector<Vector2d> U;          // (U^1, U^2)(t)
  std::vector<Matrix2d> Ulm;        // U^{lm}(t) = int u^l U^m, index (l-1, m-1)
  std::vector<Matrix2d> Us;         // symmetric part
  std::vector<double> Ua21;         // antisymmetric (2,1) entry
};

IteratedIntegrals iterated_integrals(const RotationalControl& u,
                                     const std::vector<double>& t_grid,
                                     const QuadratureConfig& cfg = {});

}  // namespace rotnft
