#include "rotnft/scenarios.hpp"

#include <cmath>
#include <sstream>

namespace rotnft {

namespace {

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Box box3() { return Box::cube(3, 1.0); }

// f1 = (g1, 0, -x2), f2 = (0, g2, x1): the integrator family shared by the
// Brockett variants.
void brockett_fields(ControlAffineSystem& sys, double g1, double g2) {
  sys.dim = 3;
  sys.f1 = [g1](const Vector& x) {
    Vector v(3);
    v << g1, 0.0, -x[1];
    return v;
  };
  sys.f2 = [g2](const Vector& x) {
    Vector v(3);
    v << 0.0, g2, x[0];
    return v;
  };
  sys.df1 = [](const Vector&) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 1) = -1.0;
    return m;
  };
  sys.df2 = [](const Vector&) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 0) = 1.0;
    return m;
  };
  sys.analytic_derivatives = true;
  sys.lip_f = 1.0;
  sys.bound_f = std::hypot(g1, 1.0) + std::hypot(g2, 1.0) + 0.01;
  sys.working_box = box3();
}

Constraint flat_constraint() {
  Constraint c;
  c.h = [](const Vector& x) { return x[2]; };
  c.grad_h = [](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    g[2] = 1.0;
    return g;
  };
  c.hess_h = [](const Vector& x) { return Matrix::Zero(x.size(), x.size()); };
  c.analytic_derivatives = true;
  c.lip_h = 1.0;
  c.working_box = box3();
  return c;
}

// h = lambda (c1 x1^2 + c2 x2^2)^p + x3, guarded at the axis.
Constraint power_constraint(double lambda, double c1, double c2, double p) {
  Constraint c;
  c.h = [lambda, c1, c2, p](const Vector& x) {
    const double w = c1 * x[0] * x[0] + c2 * x[1] * x[1];
    return lambda * std::pow(w, p) + x[2];
  };
  c.grad_h = [lambda, c1, c2, p](const Vector& x) {
    const double w = c1 * x[0] * x[0] + c2 * x[1] * x[1];
    Vector g(3);
    const double wp = w > 0.0 ? std::pow(w, p - 1.0) : 0.0;
    g[0] = 2.0 * lambda * p * c1 * x[0] * wp;
    g[1] = 2.0 * lambda * p * c2 * x[1] * wp;
    g[2] = 1.0;
    return g;
  };
  c.hess_h = [lambda, c1, c2, p](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    const double w = c1 * x[0] * x[0] + c2 * x[1] * x[1];
    if (w <= 0.0) return m;  // continuous extension at the axis (p > 1)
    const double wp1 = std::pow(w, p - 1.0);
    const double wp2 = std::pow(w, p - 2.0);
    const double ci[2] = {c1, c2};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        m(i, j) = 4.0 * lambda * p * (p - 1.0) * wp2 * ci[i] * x[i] * ci[j] * x[j];
        if (i == j) m(i, j) += 2.0 * lambda * p * ci[i] * wp1;
      }
    }
    return m;
  };
  c.analytic_derivatives = true;
  c.lip_h = 1.0 + 2.0 * lambda * p * std::max(c1, c2);
  c.working_box = box3();
  return c;
}

SingularSetModel axis_singular_set() {
  SingularSetModel m;
  m.exact = true;
  m.description = "x3 axis";
  m.distance = [](const Vector& x) { return std::hypot(x[0], x[1]); };
  m.project = [](const Vector& x) {
    Vector p = Vector::Zero(3);
    p[2] = x[2];
    return p;
  };
  m.samples = [](int n) {
    std::vector<Vector> out;
    for (int i = 0; i < n; ++i) {
      Vector p = Vector::Zero(3);
      p[2] = -1.0 + 2.0 * (i + 0.5) / n;
      out.push_back(std::move(p));
    }
    return out;
  };
  return m;
}

Scenario brockett_flat() {
  Scenario s;
  s.name = "brockett_flat";
  brockett_fields(s.system, 1.0, 1.0);
  s.system.name = s.name;
  s.constraint = flat_constraint();
  s.singular = axis_singular_set();
  s.expected = {false, true, true, true, true};
  return s;
}

Scenario brockett_power(const std::map<std::string, double>& params) {
  Scenario s;
  const double p = get(params, "p", 1.5);
  const double lambda = get(params, "lambda", 1.0);
  if (p <= 1.0) throw DomainError("brockett_power: requires p > 1");
  s.name = "brockett_power";
  s.params = {{"p", p}, {"lambda", lambda}};
  brockett_fields(s.system, 1.0, 1.0);
  s.system.name = s.name;
  s.constraint = power_constraint(lambda, 1.0, 1.0, p);
  s.singular = axis_singular_set();
  s.expected = {false, p >= 1.5, true, true, true};
  return s;
}

Scenario brockett_general(const std::map<std::string, double>& params) {
  Scenario s;
  const double g1 = get(params, "gamma1", 1.0);
  const double g2 = get(params, "gamma2", 2.0);
  const double c1 = get(params, "c1", 1.0);
  const double c2 = get(params, "c2", 1.0);
  const double p = get(params, "p", 2.0);
  s.name = "brockett_general";
  s.params = {{"gamma1", g1}, {"gamma2", g2}, {"c1", c1}, {"c2", c2}, {"p", p}};
  brockett_fields(s.system, g1, g2);
  s.system.name = s.name;
  s.constraint = power_constraint(1.0, c1, c2, p);
  s.singular = axis_singular_set();
  const bool h4 = std::abs(g1 + g2) > 1e-12;
  s.expected = {false, p >= 1.5, h4, true, true};
  return s;
}

Scenario brockett_nonlinear() {
  Scenario s;
  s.name = "brockett_nonlinear";
  ControlAffineSystem& sys = s.system;
  sys.dim = 3;
  sys.name = s.name;
  sys.f1 = [](const Vector& x) {
    Vector v(3);
    v << 1.0, 0.0, -x[1] + std::pow(x[2], 4);
    return v;
  };
  sys.f2 = [](const Vector& x) {
    Vector v(3);
    v << 0.0, 1.0, x[0] + std::pow(x[2], 4);
    return v;
  };
  sys.df1 = [](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 1) = -1.0;
    m(2, 2) = 4.0 * std::pow(x[2], 3);
    return m;
  };
  sys.df2 = [](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 0) = 1.0;
    m(2, 2) = 4.0 * std::pow(x[2], 3);
    return m;
  };
  sys.analytic_derivatives = true;
  sys.lip_f = 4.2;
  sys.bound_f = 2.0 * std::sqrt(1.0 + 4.0) + 0.01;
  sys.working_box = box3();
  s.constraint = flat_constraint();

  auto curve = [](double z) {
    Vector p(3);
    p << -std::pow(z, 4), std::pow(z, 4), z;
    return p;
  };
  s.singular = SingularSetModel::from_curve(curve, -1.0, 1.0, box3());
  s.singular.description = "quartic curve (-z^4, z^4, z)";
  s.expected = {false, true, true, true, true};
  return s;
}

Scenario h6_violator() {
  Scenario s;
  s.name = "h6_violator";
  ControlAffineSystem& sys = s.system;
  sys.dim = 3;
  sys.name = s.name;
  sys.f1 = [](const Vector& x) {
    Vector v(3);
    v << 1.0, 0.0, -x[1];
    return v;
  };
  sys.f2 = [](const Vector& x) {
    Vector v(3);
    v << 0.0, 1.0, x[0] * x[0];
    return v;
  };
  sys.df1 = [](const Vector&) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 1) = -1.0;
    return m;
  };
  sys.df2 = [](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    m(2, 0) = 2.0 * x[0];
    return m;
  };
  sys.analytic_derivatives = true;
  sys.lip_f = 2.0;
  sys.bound_f = 2.0 * std::sqrt(2.0) + 0.01;
  sys.working_box = box3();
  s.constraint = flat_constraint();
  s.singular = axis_singular_set();
  s.expected = {false, true, true, true, false};
  return s;
}

Scenario counterexample() {
  Scenario s;
  s.name = "counterexample";
  ControlAffineSystem& sys = s.system;
  sys.dim = 2;
  sys.name = s.name;
  sys.f1 = [](const Vector&) {
    Vector v(2);
    v << 1.0, 0.0;
    return v;
  };
  sys.f2 = [](const Vector&) { return Vector(Vector::Zero(2)); };
  sys.df1 = [](const Vector&) { return Matrix(Matrix::Zero(2, 2)); };
  sys.df2 = [](const Vector&) { return Matrix(Matrix::Zero(2, 2)); };
  sys.analytic_derivatives = true;
  sys.lip_f = 0.0;
  sys.bound_f = 1.01;
  sys.working_box = Box::cube(2, 1.0);

  Constraint& c = s.constraint;
  c.h = [](const Vector& x) { return x[1] - x[0] * x[0]; };
  c.grad_h = [](const Vector& x) {
    Vector g(2);
    g << -2.0 * x[0], 1.0;
    return g;
  };
  c.hess_h = [](const Vector&) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -2.0;
    return m;
  };
  c.analytic_derivatives = true;
  c.lip_h = 3.0;
  c.working_box = sys.working_box;

  // S is the ray { (0, z) : z <= 0 }.
  SingularSetModel& m = s.singular;
  m.exact = true;
  m.description = "ray x1 = 0, x2 <= 0";
  m.distance = [](const Vector& x) {
    if (x[1] <= 0.0) return std::abs(x[0]);
    return std::hypot(x[0], x[1]);
  };
  m.project = [](const Vector& x) {
    Vector p(2);
    p << 0.0, std::min(x[1], 0.0);
    return p;
  };
  m.samples = [](int n) {
    std::vector<Vector> out;
    for (int i = 0; i < n; ++i) {
      Vector p(2);
      p << 0.0, -(i + 0.5) / n;
      out.push_back(std::move(p));
    }
    return out;
  };
  s.expected = {false, true, false, true, true};
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"brockett_flat",      "brockett_power", "brockett_general",
          "brockett_nonlinear", "h6_violator",    "counterexample"};
}

Scenario make_scenario(const std::string& name,
                       const std::map<std::string, double>& params) {
  if (name == "brockett_flat") return brockett_flat();
  if (name == "brockett_power") return brockett_power(params);
  if (name == "brockett_general") return brockett_general(params);
  if (name == "brockett_nonlinear") return brockett_nonlinear();
  if (name == "h6_violator") return h6_violator();
  if (name == "counterexample") return counterexample();
  std::ostringstream msg;
  msg << "unknown scenario '" << name << "'; available:";
  for (const auto& n : scenario_names()) msg << " " << n;
  throw DomainError(msg.str());
}

Vector brockett_closed_form(double omega, double t) {
  Vector x(3);
  const double wt = omega * t;
  x[0] = std::sin(wt) / omega;
  x[1] = (1.0 - std::cos(wt)) / omega;
  x[2] = (wt - std::sin(wt)) / (omega * omega);
  return x;
}

double brockett_omega_for_violation(double d, double T) {
  // Invert d(w) = (wT - sin wT)/w^2 on the decreasing large-frequency branch.
  auto dv = [T](double w) { return (w * T - std::sin(w * T)) / (w * w); };
  double lo = 4.0 * kPi / T;  // past the small-frequency hump
  double hi = 1e10;
  if (d >= dv(lo)) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (dv(mid) > d) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

}  // namespace rotnft
