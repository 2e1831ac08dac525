#pragma once

#include "rotnft/drops.hpp"
#include "rotnft/rotation.hpp"
#include "rotnft/system.hpp"

namespace rotnft {

// One piece of a piecewise control; u is evaluated at absolute time.
struct ControlSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::function<Vector2d(double)> u;
  double min_period = 0.0;  // fastest oscillation this segment carries; 0 = none
  std::string label;
};

// Ordered contiguous segments covering [0, T], values in the closed unit disc.
struct ControlFunction {
  std::vector<ControlSegment> segments;

  Vector2d operator()(double t) const;
  double horizon() const { return segments.empty() ? 0.0 : segments.back().t1; }
  double min_period() const;
  void check_cover(double T) const;  // throws ConfigError on gaps/overlap

  static ControlFunction single(std::function<Vector2d(double)> u, double T,
                                double min_period = 0.0, std::string label = {});
};

// Insert a segment of the given duration at t_ins; everything after t_ins is
// delayed by the same duration and truncated at the original horizon.
ControlFunction splice_with_insert(const ControlFunction& base, double t_ins,
                                   double duration,
                                   std::function<Vector2d(double)> u_ins,
                                   double min_period_ins,
                                   const std::string& label);

struct StepPolicy {
  double base_step = 0.0;         // 0 => derived from the control resolution
  int min_steps_per_period = 50;  // per fastest control oscillation
  double fallback_step = 1e-3;    // used when the control carries no period
  long max_total_steps = 80'000'000;
};

struct ProcessMeta {
  std::string method = "rk4";
  double step = 0.0;        // finest step used
  StepPolicy policy;
  double error_estimate = -1.0;
};

// A time grid with states, plus the control that generated it.
struct Process {
  std::vector<double> t;
  Matrix x;  // dim x N, column per node
  ControlFunction control;
  ProcessMeta meta;

  int size() const { return static_cast<int>(t.size()); }
  Vector state(int i) const { return x.col(i); }
  double horizon() const { return t.empty() ? 0.0 : t.back(); }

  // Cubic Hermite interpolation with finite-difference node slopes.
  Vector state_at(double tq) const;
};

// Classical fixed-step 4th order integration, segment-aligned so control
// discontinuities land on nodes. Throws ConfigError when the requested step
// under-resolves a rotational segment or exceeds the step budget.
Process integrate(const ControlAffineSystem& sys, const ControlFunction& control,
                  const Vector& x0, double horizon, const StepPolicy& policy = {});

// Re-integrate from (t_start, x_start) keeping the shared prefix of `prefix`
// up to t_start; used to splice candidate legs without recomputing [0, t_start].
Process integrate_suffix(const ControlAffineSystem& sys, const Process& prefix,
                         const ControlFunction& control, double t_start,
                         double horizon, const StepPolicy& policy);

struct ViolationReport {
  double d = 0.0;        // max_t max(h(x(t)), 0)
  double tau1 = 0.0;     // first violation time (= T when feasible)
  bool feasible = true;
  double argmax_t = 0.0;
};

ViolationReport violation(const Process& proc, const Constraint& con);

// First time strictly after t_from at which h > 0; infinity when none.
double first_violation_after(const Process& proc, const Constraint& con,
                             double t_from);

// Max of h along the process restricted to [t_from, T].
double max_h_after(const Process& proc, const Constraint& con, double t_from);

// Prop-style second-order displacement test: integrates the rotational control
// over whole periods and compares y(tau) - x0 against
// sgn(omega) tau^2 (A(tau0)/(k tau0^2)) [f1,f2](x0), sweeping tau to fit the
// remainder exponent and constant.
struct BracketDisplacementReport {
  std::vector<double> taus;
  std::vector<double> residual_norms;
  Vector leading_term;        // at the largest tau
  double fitted_exponent = 0.0;
  double fitted_B = 0.0;      // max |E(tau)| / tau^3 (arc-length base: |r| = 1)
};

BracketDisplacementReport bracket_displacement_check(
    const ControlAffineSystem& sys, const DropCurve& drop, const Vector& x0,
    double tau_max, int k = 1, int sign_omega = -1, int n_sweep = 7,
    const StepPolicy& policy = {});

// Cubic descent test at a point near the singular set: integrates u = r(omega t)
// on [0, tau] and measures c with h(y(t)) - h(x0) <= -c t^3 / tau.
struct DescentReport {
  bool descent = false;
  double c_measured = 0.0;      // min over samples of (h(x0)-h(y(t))) tau / t^3
  double alpha_x = 0.0;         // (C tau0 / 2) |grad h . [f1,f2](x0)|
  double stima8_const = 0.0;    // tau0 C |grad h . [f1,f2](x0)|
  double cubic_constant = 0.0;  // measured drop area constant C
  double failure_t = -1.0;      // first sample with h above h(x0), if any
  double max_h_excess = 0.0;    // max over samples of h(y(t)) - h(x0)
};

DescentReport descent_check(const ControlAffineSystem& sys, const Constraint& con,
                            const DropCurve& drop, const Vector& x0, double omega,
                            double tau, const StepPolicy& policy = {});

}  // namespace rotnft
