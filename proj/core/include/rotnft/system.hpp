#pragma once

#include "rotnft/types.hpp"

#include <functional>
#include <optional>

namespace rotnft {

using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;
using ScalarField = std::function<double(const Vector&)>;

// Central finite differences; step_rel scales with the magnitude of x.
// First derivatives use an eps^(1/3)-sized step, Hessians an eps^(1/4)-sized
// one (documented in the README; the defaults below encode that).
inline constexpr double kFdStepJacobian = 6e-6;
inline constexpr double kFdStepHessian = 2e-4;

Matrix fd_jacobian(const VectorField& f, const Vector& x, double step = kFdStepJacobian);
Vector fd_gradient(const ScalarField& h, const Vector& x, double step = kFdStepJacobian);
Matrix fd_hessian(const ScalarField& h, const Vector& x, double step = kFdStepHessian);

// The pair (f1, f2) of a symmetric control-affine system
// xdot = f1(x) u1 + f2(x) u2 with controls in the closed unit disc.
struct ControlAffineSystem {
  int dim = 0;
  VectorField f1, f2;
  MatrixField df1, df2;       // null => central finite differences, flagged
  bool analytic_derivatives = false;
  double lip_f = 0.0;         // common Lipschitz constant k_f
  double bound_f = 0.0;       // k0 with |f1| + |f2| <= k0 on the working box
  Box working_box;
  std::string name;

  Matrix jac1(const Vector& x) const;
  Matrix jac2(const Vector& x) const;

  Vector rhs(const Vector& x, const Vector2d& u) const { return f1(x) * u[0] + f2(x) * u[1]; }
};

// State constraint C = { x : h(x) <= 0 }.
struct Constraint {
  ScalarField h;
  VectorField grad_h;         // null => finite differences
  MatrixField hess_h;         // null => finite differences
  bool analytic_derivatives = false;
  double lip_h = 0.0;         // k_h
  Box working_box;

  Vector grad(const Vector& x) const;
  Matrix hess(const Vector& x) const;
};

// A smooth invertible change of coordinates with Jacobian access.
struct Diffeomorphism {
  VectorField forward;        // x -> xt
  VectorField inverse;        // xt -> x
  MatrixField jacobian;       // Jacobian of forward at x; null => finite differences
  std::string name;

  Matrix jac(const Vector& x) const;
};

// System and constraint expressed in the coordinates xt = diffeo(x):
// ft_i(xt) = J(x) f_i(x), ht(xt) = h(x). Derivatives of the transformed data
// are finite-difference (the transform is exercised as a black box).
struct TransformedData {
  ControlAffineSystem system;
  Constraint constraint;
};
TransformedData pushforward(const ControlAffineSystem& sys, const Constraint& con,
                            const Diffeomorphism& diffeo);

}  // namespace rotnft
