#include "rotnft/simulate.hpp"

#include "rotnft/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rotnft {

Vector2d ControlFunction::operator()(double t) const {
  if (segments.empty()) return Vector2d::Zero();
  if (t <= segments.front().t0) return segments.front().u(segments.front().t0);
  for (const auto& s : segments) {
    if (t >= s.t0 && t < s.t1) return s.u(t);
  }
  const auto& last = segments.back();
  return last.u(std::min(t, last.t1));
}

double ControlFunction::min_period() const {
  double p = 0.0;
  for (const auto& s : segments) {
    if (s.min_period > 0.0) p = p == 0.0 ? s.min_period : std::min(p, s.min_period);
  }
  return p;
}

void ControlFunction::check_cover(double T) const {
  if (segments.empty()) throw ConfigError("control: no segments");
  if (segments.front().t0 > 1e-12) throw ConfigError("control: does not start at 0");
  for (size_t i = 0; i + 1 < segments.size(); ++i) {
    if (std::abs(segments[i].t1 - segments[i + 1].t0) > 1e-12) {
      throw ConfigError("control: segments do not tile the horizon");
    }
  }
  if (segments.back().t1 < T - 1e-12) {
    throw ConfigError("control: horizon not covered");
  }
}

ControlFunction ControlFunction::single(std::function<Vector2d(double)> u, double T,
                                        double min_period, std::string label) {
  ControlFunction c;
  c.segments.push_back({0.0, T, std::move(u), min_period, std::move(label)});
  return c;
}

ControlFunction splice_with_insert(const ControlFunction& base, double t_ins,
                                   double duration,
                                   std::function<Vector2d(double)> u_ins,
                                   double min_period_ins, const std::string& label) {
  const double T = base.horizon();
  ControlFunction out;
  for (const auto& s : base.segments) {
    if (s.t1 <= t_ins) {
      out.segments.push_back(s);
    } else if (s.t0 < t_ins) {
      ControlSegment head = s;
      head.t1 = t_ins;
      out.segments.push_back(std::move(head));
    }
  }
  ControlSegment ins;
  ins.t0 = t_ins;
  ins.t1 = std::min(t_ins + duration, T);
  ins.u = std::move(u_ins);
  ins.min_period = min_period_ins;
  ins.label = label;
  out.segments.push_back(std::move(ins));

  // Delayed tail: base control shifted right by `duration`, truncated at T.
  for (const auto& s : base.segments) {
    if (s.t1 <= t_ins) continue;
    ControlSegment tail = s;
    tail.t0 = std::max(s.t0, t_ins) + duration;
    tail.t1 = s.t1 + duration;
    if (tail.t0 >= T) break;
    tail.t1 = std::min(tail.t1, T);
    auto inner = s.u;
    tail.u = [inner, duration](double t) { return inner(t - duration); };
    out.segments.push_back(std::move(tail));
  }
  // Ensure exact coverage to T (duration may push the last tail past it).
  if (!out.segments.empty()) out.segments.back().t1 = std::max(out.segments.back().t1, T);
  return out;
}

namespace {

struct Rk4Workspace {
  Vector k1, k2, k3, k4, xt;
  void resize(int n) {
    k1.resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    xt.resize(n);
  }
};

inline void rhs_eval(const ControlAffineSystem& sys, const Vector& x,
                     const Vector2d& u, Vector& out) {
  out.noalias() = sys.f1(x) * u[0];
  out.noalias() += sys.f2(x) * u[1];
}

// One RK4 step of xdot = f1(x)u1 + f2(x)u2 with time-varying control.
inline void rk4_step(const ControlAffineSystem& sys, const ControlFunction& ctrl,
                     double t, double h, Vector& x, Rk4Workspace& w) {
  const Vector2d u0 = ctrl(t);
  const Vector2d um = ctrl(t + 0.5 * h);
  const Vector2d u1 = ctrl(t + h);
  rhs_eval(sys, x, u0, w.k1);
  w.xt.noalias() = x + 0.5 * h * w.k1;
  rhs_eval(sys, w.xt, um, w.k2);
  w.xt.noalias() = x + 0.5 * h * w.k2;
  rhs_eval(sys, w.xt, um, w.k3);
  w.xt.noalias() = x + h * w.k3;
  rhs_eval(sys, w.xt, u1, w.k4);
  x.noalias() += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

double resolve_step(const ControlFunction& control, const StepPolicy& policy) {
  const double p = control.min_period();
  double step = policy.base_step;
  if (p > 0.0) {
    const double need = p / policy.min_steps_per_period;
    if (step > 0.0 && step > need * (1.0 + 1e-9)) {
      throw ConfigError("integrate: under-resolved rotation (step " +
                        std::to_string(step) + " > period/" +
                        std::to_string(policy.min_steps_per_period) + " = " +
                        std::to_string(need) + ")");
    }
    if (step <= 0.0) step = need;
  } else if (step <= 0.0) {
    step = policy.fallback_step;
  }
  return step;
}

}  // namespace

Process integrate(const ControlAffineSystem& sys, const ControlFunction& control,
                  const Vector& x0, double horizon, const StepPolicy& policy) {
  control.check_cover(horizon);
  const double step = resolve_step(control, policy);

  // Count nodes first: per-segment uniform steps, boundaries aligned.
  long total = 1;
  for (const auto& s : control.segments) {
    const double a = std::max(0.0, s.t0), b = std::min(horizon, s.t1);
    if (b <= a) continue;
    total += std::max(1L, std::lround(std::ceil((b - a) / step - 1e-12)));
  }
  if (total > policy.max_total_steps) {
    throw ConfigError("integrate: step budget exceeded (" + std::to_string(total) +
                      " nodes)");
  }

  Process proc;
  proc.control = control;
  proc.meta.policy = policy;
  proc.meta.step = step;
  proc.t.reserve(total);
  proc.x.resize(x0.size(), total);

  Rk4Workspace w;
  w.resize(static_cast<int>(x0.size()));
  Vector x = x0;
  proc.t.push_back(0.0);
  proc.x.col(0) = x;
  long col = 1;
  for (const auto& s : control.segments) {
    const double a = std::max(0.0, s.t0), b = std::min(horizon, s.t1);
    if (b <= a) continue;
    const long n = std::max(1L, std::lround(std::ceil((b - a) / step - 1e-12)));
    const double h = (b - a) / n;
    for (long i = 0; i < n; ++i) {
      const double t = a + i * h;
      rk4_step(sys, control, t, h, x, w);
      proc.t.push_back(i + 1 == n ? b : t + h);
      proc.x.col(col++) = x;
    }
    if (b >= horizon - 1e-15) break;
  }
  proc.x.conservativeResize(Eigen::NoChange, col);
  return proc;
}

Process integrate_suffix(const ControlAffineSystem& sys, const Process& prefix,
                         const ControlFunction& control, double t_start,
                         double horizon, const StepPolicy& policy) {
  // Shared prefix: nodes strictly before t_start, then a short bridge step to
  // land exactly on t_start, then fresh integration of the remaining control.
  int i0 = 0;
  while (i0 + 1 < prefix.size() && prefix.t[i0 + 1] <= t_start + 1e-15) ++i0;

  ControlFunction tail;
  for (const auto& s : control.segments) {
    if (s.t1 <= t_start) continue;
    ControlSegment c = s;
    c.t0 = std::max(s.t0, t_start);
    tail.segments.push_back(std::move(c));
  }
  if (tail.segments.empty() || t_start >= horizon) {
    Process out = prefix;
    out.control = control;
    return out;
  }
  // Fake a zero-length head so check_cover accepts the tail window.
  const double step = resolve_step(tail, policy);

  Process out;
  out.control = control;
  out.meta.policy = policy;
  out.meta.step = step;

  std::vector<double> ts(prefix.t.begin(), prefix.t.begin() + i0 + 1);
  std::vector<Vector> xs;
  Vector x = prefix.x.col(i0);
  Rk4Workspace w;
  w.resize(static_cast<int>(x.size()));

  // Bridge [t[i0], t_start] under the (old == new) control before the splice.
  if (t_start > ts.back() + 1e-15) {
    const double span = t_start - ts.back();
    const long n = std::max(1L, std::lround(std::ceil(span / step - 1e-12)));
    const double h = span / n;
    for (long i = 0; i < n; ++i) {
      rk4_step(sys, control, ts.back(), h, x, w);
      ts.push_back(i + 1 == n ? t_start : ts.back() + h);
      xs.push_back(x);
    }
  }
  // Integrate the tail segments.
  for (const auto& s : tail.segments) {
    const double a = std::max(t_start, s.t0), b = std::min(horizon, s.t1);
    if (b <= a) continue;
    const long n = std::max(1L, std::lround(std::ceil((b - a) / step - 1e-12)));
    const double h = (b - a) / n;
    for (long i = 0; i < n; ++i) {
      const double t = a + i * h;
      rk4_step(sys, control, t, h, x, w);
      ts.push_back(i + 1 == n ? b : t + h);
      xs.push_back(x);
    }
    if (b >= horizon - 1e-15) break;
  }

  out.t = std::move(ts);
  out.x.resize(prefix.x.rows(), out.t.size());
  for (int i = 0; i <= i0; ++i) out.x.col(i) = prefix.x.col(i);
  for (size_t i = 0; i < xs.size(); ++i) out.x.col(i0 + 1 + static_cast<int>(i)) = xs[i];
  return out;
}

Vector Process::state_at(double tq) const {
  if (t.empty()) throw DomainError("state_at: empty process");
  if (tq <= t.front()) return x.col(0);
  if (tq >= t.back()) return x.col(size() - 1);
  const auto it = std::upper_bound(t.begin(), t.end(), tq);
  const int i = static_cast<int>(it - t.begin()) - 1;
  const double h = t[i + 1] - t[i];
  const double s = (tq - t[i]) / h;

  // Finite-difference slopes; one-sided at the ends of the grid.
  auto slope = [this](int j) {
    const int n = size();
    if (j == 0) return Vector((x.col(1) - x.col(0)) / (t[1] - t[0]));
    if (j == n - 1) return Vector((x.col(n - 1) - x.col(n - 2)) / (t[n - 1] - t[n - 2]));
    return Vector((x.col(j + 1) - x.col(j - 1)) / (t[j + 1] - t[j - 1]));
  };
  const Vector m0 = slope(i) * h, m1 = slope(i + 1) * h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x.col(i) + (s3 - 2 * s2 + s) * m0 +
         (-2 * s3 + 3 * s2) * x.col(i + 1) + (s3 - s2) * m1;
}

namespace {

// Cubic Hermite value of h(x(t)) between grid nodes.
double h_interp(const Process& proc, const Constraint& con, double tq) {
  return con.h(proc.state_at(tq));
}

}  // namespace

ViolationReport violation(const Process& proc, const Constraint& con) {
  ViolationReport rep;
  const int n = proc.size();
  double hmax = -std::numeric_limits<double>::infinity();
  int arg = 0;
  int first_pos = -1;
  for (int i = 0; i < n; ++i) {
    const double h = con.h(proc.state(i));
    if (h > hmax) {
      hmax = h;
      arg = i;
    }
    if (first_pos < 0 && h > 0.0) first_pos = i;
  }
  // Parabolic refinement of the max around the argmax node.
  double d = std::max(hmax, 0.0);
  double argt = proc.t[arg];
  if (arg > 0 && arg + 1 < n) {
    const double h0 = con.h(proc.state(arg - 1));
    const double h1 = hmax;
    const double h2 = con.h(proc.state(arg + 1));
    const double denom = h0 - 2.0 * h1 + h2;
    if (denom < -1e-300) {
      const double delta = 0.5 * (h0 - h2) / denom;
      if (std::abs(delta) <= 1.0) {
        argt = proc.t[arg] + delta * (proc.t[arg + 1] - proc.t[arg]);
        d = std::max(d, h_interp(proc, con, argt));
      }
    }
  }
  rep.d = d;
  rep.argmax_t = argt;
  rep.feasible = d <= 0.0;

  const double T = proc.horizon();
  if (rep.feasible) {
    rep.tau1 = T;
    return rep;
  }
  // Bisection on the Hermite interpolant between the last nonpositive node
  // and the first positive one, to 1e-10 * T.
  if (first_pos == 0) {
    rep.tau1 = 0.0;
    return rep;
  }
  double lo = proc.t[first_pos - 1], hi = proc.t[first_pos];
  const double tol = 1e-10 * std::max(T, 1.0);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (h_interp(proc, con, mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  rep.tau1 = 0.5 * (lo + hi);
  return rep;
}

double first_violation_after(const Process& proc, const Constraint& con,
                             double t_from) {
  const int n = proc.size();
  for (int i = 0; i < n; ++i) {
    if (proc.t[i] <= t_from) continue;
    if (con.h(proc.state(i)) > 0.0) {
      if (i == 0) return proc.t[0];
      double lo = std::max(t_from, proc.t[i - 1]), hi = proc.t[i];
      const double tol = 1e-10 * std::max(proc.horizon(), 1.0);
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (h_interp(proc, con, mid) > 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::numeric_limits<double>::infinity();
}

double max_h_after(const Process& proc, const Constraint& con, double t_from) {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < proc.size(); ++i) {
    if (proc.t[i] < t_from) continue;
    m = std::max(m, con.h(proc.state(i)));
  }
  return m;
}

BracketDisplacementReport bracket_displacement_check(
    const ControlAffineSystem& sys, const DropCurve& drop, const Vector& x0,
    double tau_max, int k, int sign_omega, int n_sweep, const StepPolicy& policy) {
  if (k < 1) throw DomainError("bracket_displacement_check: k must be >= 1");
  BracketDisplacementReport rep;
  const double tau0 = drop.period;
  const double area_period = drop.area_to(tau0);
  const Vector bracket = lie_bracket(sys, x0);

  const auto taus = logspace(1e-2 * tau_max, tau_max, n_sweep);
  std::vector<double> lx, ly;
  for (double tau : taus) {
    const double omega = sign_omega * k * tau0 / tau;
    const RotationalControl u = make_rotational(drop, omega);
    auto ctrl = ControlFunction::single([u](double t) { return u(t); }, tau,
                                        u.period(), "rotational");
    const Process proc = integrate(sys, ctrl, x0, tau, policy);
    const Vector leading =
        sign_omega * tau * tau * area_period / (k * tau0 * tau0) * bracket;
    const Vector resid = proc.state(proc.size() - 1) - x0 - leading;
    rep.taus.push_back(tau);
    rep.residual_norms.push_back(resid.norm());
    if (tau == taus.back()) rep.leading_term = leading;
    if (resid.norm() > 1e-300) {
      lx.push_back(std::log(tau));
      ly.push_back(std::log(resid.norm()));
    }
    rep.fitted_B = std::max(rep.fitted_B, resid.norm() / (tau * tau * tau));
  }
  rep.fitted_exponent = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  return rep;
}

DescentReport descent_check(const ControlAffineSystem& sys, const Constraint& con,
                            const DropCurve& drop, const Vector& x0, double omega,
                            double tau, const StepPolicy& policy) {
  DescentReport rep;
  const double tau0 = drop.period;
  const RotationalControl u = make_rotational(drop, omega);
  StepPolicy pol = policy;
  // The window may be far shorter than one rotation period; resolve it anyway.
  if (pol.base_step <= 0.0) {
    pol.base_step = std::min(u.period() / pol.min_steps_per_period, tau / 400.0);
  }
  auto ctrl = ControlFunction::single([u](double t) { return u(t); }, tau,
                                      u.period(), "rotational");
  const Process proc = integrate(sys, ctrl, x0, tau, pol);

  const double h0 = con.h(x0);
  double c = std::numeric_limits<double>::infinity();
  rep.descent = true;
  rep.max_h_excess = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < proc.size(); ++i) {
    const double t = proc.t[i];
    const double hy = con.h(proc.state(i));
    const double dh = hy - h0;
    rep.max_h_excess = std::max(rep.max_h_excess, dh);
    // Floating-point noise floor relative to the h magnitudes involved; the
    // violation scale shrinks with the probe window, so no absolute floor.
    const double noise =
        64.0 * std::numeric_limits<double>::epsilon() * (std::abs(hy) + std::abs(h0));
    if (dh >= noise && dh > 0.0) {
      rep.descent = false;
      if (rep.failure_t < 0.0) rep.failure_t = t;
    }
    if (t >= tau / 50.0) c = std::min(c, -dh * tau / (t * t * t));
  }
  rep.c_measured = rep.descent && std::isfinite(c) ? c : 0.0;

  // Cubic area constant of this drop on [0, tau0], for the comparison line.
  double cdrop = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 256; ++i) {
    const double t = tau0 * i / 256.0;
    cdrop = std::min(cdrop, drop.area_to(t) / (t * t * t));
  }
  rep.cubic_constant = cdrop;
  const double bn = std::abs(con.grad(x0).dot(lie_bracket(sys, x0)));
  rep.alpha_x = 0.5 * cdrop * tau0 * bn;
  rep.stima8_const = cdrop * tau0 * bn;
  return rep;
}

}  // namespace rotnft
