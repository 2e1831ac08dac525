#include "rotnft/system.hpp"

namespace rotnft {

namespace {
double step_for(const Vector& x, double rel) {
  return rel * std::max(1.0, x.lpNorm<Eigen::Infinity>());
}
}  // namespace

Matrix fd_jacobian(const VectorField& f, const Vector& x, double step) {
  const double h = step_for(x, step);
  const int n = static_cast<int>(x.size());
  Vector xp = x, xm = x;
  Matrix out;
  for (int j = 0; j < n; ++j) {
    xp[j] += h;
    xm[j] -= h;
    const Vector d = (f(xp) - f(xm)) / (2.0 * h);
    if (j == 0) out.resize(d.size(), n);
    out.col(j) = d;
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return out;
}

Vector fd_gradient(const ScalarField& f, const Vector& x, double step) {
  const double h = step_for(x, step);
  const int n = static_cast<int>(x.size());
  Vector xp = x, xm = x, out(n);
  for (int j = 0; j < n; ++j) {
    xp[j] += h;
    xm[j] -= h;
    out[j] = (f(xp) - f(xm)) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return out;
}

Matrix fd_hessian(const ScalarField& f, const Vector& x, double step) {
  const double h = step_for(x, step);
  const int n = static_cast<int>(x.size());
  Matrix out(n, n);
  const double f0 = f(x);
  Vector y = x;
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    out(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      y[i] = x[i] + h;
      y[j] = x[j] + h;
      const double fpp = f(y);
      y[j] = x[j] - h;
      const double fpm = f(y);
      y[i] = x[i] - h;
      const double fmm = f(y);
      y[j] = x[j] + h;
      const double fmp = f(y);
      y[i] = x[i];
      y[j] = x[j];
      out(i, j) = out(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return out;
}

Matrix ControlAffineSystem::jac1(const Vector& x) const {
  if (df1) return df1(x);
  if (!f1) throw EvalError("system: f1 not set", x);
  return fd_jacobian(f1, x);
}

Matrix ControlAffineSystem::jac2(const Vector& x) const {
  if (df2) return df2(x);
  if (!f2) throw EvalError("system: f2 not set", x);
  return fd_jacobian(f2, x);
}

Vector Constraint::grad(const Vector& x) const {
  if (grad_h) return grad_h(x);
  return fd_gradient(h, x);
}

Matrix Constraint::hess(const Vector& x) const {
  if (hess_h) return hess_h(x);
  return fd_hessian(h, x);
}

Matrix Diffeomorphism::jac(const Vector& x) const {
  if (jacobian) return jacobian(x);
  return fd_jacobian(forward, x);
}

TransformedData pushforward(const ControlAffineSystem& sys, const Constraint& con,
                            const Diffeomorphism& diffeo) {
  TransformedData out;
  const Diffeomorphism d = diffeo;
  const ControlAffineSystem base = sys;

  auto push_field = [d](const VectorField& f) {
    return [d, f](const Vector& xt) {
      const Vector x = d.inverse(xt);
      return Vector(d.jac(x) * f(x));
    };
  };

  out.system.dim = sys.dim;
  out.system.f1 = push_field(base.f1);
  out.system.f2 = push_field(base.f2);
  out.system.analytic_derivatives = false;  // FD in the new chart, flagged
  out.system.lip_f = sys.lip_f;
  out.system.bound_f = sys.bound_f;
  out.system.working_box = sys.working_box;
  out.system.name = sys.name + "~" + (d.name.empty() ? "diffeo" : d.name);

  const Constraint basec = con;
  out.constraint.h = [d, basec](const Vector& xt) { return basec.h(d.inverse(xt)); };
  out.constraint.analytic_derivatives = false;
  out.constraint.lip_h = con.lip_h;
  out.constraint.working_box = con.working_box;
  return out;
}

}  // namespace rotnft
