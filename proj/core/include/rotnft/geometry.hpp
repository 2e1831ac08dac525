#pragma once

#include "rotnft/quadform.hpp"
#include "rotnft/system.hpp"

#include <optional>

namespace rotnft {

// [f1, f2](x) = Df2(x) f1(x) - Df1(x) f2(x).
Vector lie_bracket(const ControlAffineSystem& sys, const Vector& x);

// First-order boundary residual (grad h . f1, grad h . f2)(x).
Vector2d boundary_residual(const ControlAffineSystem& sys, const Constraint& con,
                           const Vector& x);

// The 2x2 matrix Lambda_lm = f_l . D^2h f_m + grad h . Df_l f_m together with
// its symmetric part S and antisymmetric part A. A(2,1) equals
// 1/2 grad h . [f1, f2].
struct LambdaMatrices {
  Matrix2d lambda;
  SymForm2 sym;
  double a21 = 0.0;
  Vector point;
};
LambdaMatrices lambda_matrices(const ControlAffineSystem& sys, const Constraint& con,
                               const Vector& x);

// The singular set S = { x in C : grad h . f1 = grad h . f2 = 0 }.
// Built-in scenarios supply exact parameterizations; projected_grid gives a
// best-effort estimate for generic systems (resolution is reported).
struct SingularSetModel {
  std::function<double(const Vector&)> distance;        // d_S(x)
  std::function<Vector(const Vector&)> project;         // nearest point of S
  std::function<std::vector<Vector>(int)> samples;      // n samples of S in the box
  bool exact = false;
  double resolution = 0.0;                              // grid estimates only
  std::string description;

  static SingularSetModel from_curve(std::function<Vector(double)> param,
                                     double s_lo, double s_hi, const Box& box,
                                     int refine_samples = 2048);
  static SingularSetModel projected_grid(const ControlAffineSystem& sys,
                                         const Constraint& con, const Box& box,
                                         int per_axis);
  static SingularSetModel empty();
};

struct AuditConfig {
  int grid_per_axis = 9;
  int n_mc = 2000;
  std::uint64_t seed = 1;
  double tol_singular_rel = 1e-9;
  double tol_boundary_rel = 1e-9;
  double delta_collar = 0.25;     // collar width for (H6)
  double h4_alpha_min = 1e-6;
  double h6_d0_min = 1e-2;
  double ipc_gamma_min = 1e-3;
  int n_s_samples = 120;
  int n_collar_dirs = 16;
  double h3_growth_cap = 1.3;     // per-decade Hessian Lipschitz growth cap
};

struct SingularPointRecord {
  Vector x;
  double bracket_normal = 0.0;    // grad h . [f1,f2]
  SymForm2 s_form;
  FormClass cls = FormClass::kNegativeSemidefinite;
};

struct CollarRecord {
  Vector x;
  double residual_norm = 0.0;
  double d_s = 0.0;
  double ratio = 0.0;
};

struct AssumptionAudit {
  bool singular_detected = false;
  std::string regime;             // "second-order" or "first-order-ipc"

  bool ipc_pass = false;
  double ipc_min_residual = 0.0;

  bool h1_pass = false;
  double h1_jacobian_err = 0.0;
  double h1_bound_excess = 0.0;

  bool h3_pass = false;
  double h3_grad_min = 0.0;
  double h3_hess_growth = 0.0;    // per-decade Lipschitz ratio growth

  bool h4_pass = false;
  double alpha_hat = 0.0;
  Vector h4_witness;

  bool h5_pass = false;
  std::vector<FormClass> h5_classes;

  bool h6_pass = false;
  double d0_hat = 0.0;
  Vector h6_witness;

  std::vector<SingularPointRecord> s_records;
  std::vector<CollarRecord> collar_records;
  int n_grid = 0;
  int n_mc = 0;
  bool fd_fallback = false;

  bool all_pass() const { return h1_pass && h3_pass && h4_pass && h5_pass && h6_pass; }
};

AssumptionAudit audit_assumptions(const ControlAffineSystem& sys, const Constraint& con,
                                  const SingularSetModel& singular,
                                  const AuditConfig& cfg = {});

struct InvariancePoint {
  Vector x;
  double discrepancy = 0.0;
  bool skipped = false;
};

struct InvarianceReport {
  double max_discrepancy = 0.0;
  int n_skipped = 0;
  std::vector<InvariancePoint> points;
};

// Prop-style coordinate invariance check of S: recomputes the symmetric part
// in the transformed chart and reports the max entrywise discrepancy.
InvarianceReport invariance_audit(const ControlAffineSystem& sys, const Constraint& con,
                                  const Diffeomorphism& diffeo,
                                  const std::vector<Vector>& points);

// Grid + Monte Carlo sample hybrid over a box (deterministic given the seed).
std::vector<Vector> sample_box(const Box& box, int grid_per_axis, int n_mc,
                               std::uint64_t seed);

}  // namespace rotnft
