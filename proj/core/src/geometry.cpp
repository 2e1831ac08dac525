#include "rotnft/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace rotnft {

Vector lie_bracket(const ControlAffineSystem& sys, const Vector& x) {
  return sys.jac2(x) * sys.f1(x) - sys.jac1(x) * sys.f2(x);
}

Vector2d boundary_residual(const ControlAffineSystem& sys, const Constraint& con,
                           const Vector& x) {
  const Vector g = con.grad(x);
  return {g.dot(sys.f1(x)), g.dot(sys.f2(x))};
}

LambdaMatrices lambda_matrices(const ControlAffineSystem& sys, const Constraint& con,
                               const Vector& x) {
  if (!con.h) throw ConfigError("lambda_matrices: constraint has no Hessian provider");
  const Vector g = con.grad(x);
  const Matrix H = con.hess(x);
  const Vector f[2] = {sys.f1(x), sys.f2(x)};
  const Matrix J[2] = {sys.jac1(x), sys.jac2(x)};

  LambdaMatrices out;
  out.point = x;
  for (int l = 0; l < 2; ++l) {
    for (int m = 0; m < 2; ++m) {
      out.lambda(l, m) = f[l].dot(H * f[m]) + g.dot(J[l] * f[m]);
    }
  }
  out.sym.q11 = out.lambda(0, 0);
  out.sym.q12 = 0.5 * (out.lambda(0, 1) + out.lambda(1, 0));
  out.sym.q22 = out.lambda(1, 1);
  out.a21 = 0.5 * (out.lambda(1, 0) - out.lambda(0, 1));
  return out;
}

SingularSetModel SingularSetModel::from_curve(std::function<Vector(double)> param,
                                              double s_lo, double s_hi, const Box& box,
                                              int refine_samples) {
  SingularSetModel m;
  m.exact = true;
  m.description = "parametric curve";

  auto nearest_s = [param, s_lo, s_hi, refine_samples](const Vector& x) {
    // Coarse scan, then golden-section refinement of |x - param(s)|^2.
    double best_s = s_lo, best = std::numeric_limits<double>::max();
    const int n = refine_samples;
    for (int i = 0; i <= n; ++i) {
      const double s = s_lo + (s_hi - s_lo) * i / n;
      const double d = (x - param(s)).squaredNorm();
      if (d < best) {
        best = d;
        best_s = s;
      }
    }
    const double h = (s_hi - s_lo) / n;
    double a = std::max(s_lo, best_s - h), b = std::min(s_hi, best_s + h);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d2 = a + gr * (b - a);
    double fc = (x - param(c)).squaredNorm(), fd = (x - param(d2)).squaredNorm();
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) {
        b = d2;
        d2 = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = (x - param(c)).squaredNorm();
      } else {
        a = c;
        c = d2;
        fc = fd;
        d2 = a + gr * (b - a);
        fd = (x - param(d2)).squaredNorm();
      }
    }
    return 0.5 * (a + b);
  };

  m.project = [param, nearest_s](const Vector& x) { return param(nearest_s(x)); };
  m.distance = [param, nearest_s](const Vector& x) {
    return (x - param(nearest_s(x))).norm();
  };
  m.samples = [param, s_lo, s_hi, box](int n) {
    std::vector<Vector> out;
    for (int i = 0; i < n; ++i) {
      const double s = s_lo + (s_hi - s_lo) * (i + 0.5) / n;
      Vector p = param(s);
      if (box.contains(p, 1e-12)) out.push_back(std::move(p));
    }
    return out;
  };
  return m;
}

SingularSetModel SingularSetModel::projected_grid(const ControlAffineSystem& sys,
                                                  const Constraint& con, const Box& box,
                                                  int per_axis) {
  // Collect grid points whose residual is small at grid scale; the point
  // cloud stands in for S. Documented resolution = one grid cell.
  const int n = box.dim();
  const double cell =
      (box.hi - box.lo).maxCoeff() / std::max(1, per_axis - 1);
  std::vector<Vector> cloud;
  std::vector<int> idx(n, 0);
  const double thresh = 2.0 * cell * std::max(1.0, sys.lip_f + con.lip_h);

  std::function<void(int)> walk = [&](int axis) {
    if (axis == n) {
      Vector x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / std::max(1, per_axis - 1);
      }
      if (con.h(x) <= 1e-9 && boundary_residual(sys, con, x).norm() <= thresh) {
        cloud.push_back(std::move(x));
      }
      return;
    }
    for (idx[axis] = 0; idx[axis] < per_axis; ++idx[axis]) walk(axis + 1);
  };
  walk(0);

  SingularSetModel m;
  m.exact = false;
  m.resolution = cell;
  m.description = "projected grid estimate";
  auto shared = std::make_shared<std::vector<Vector>>(std::move(cloud));
  m.distance = [shared](const Vector& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : *shared) best = std::min(best, (x - p).norm());
    return best;
  };
  m.project = [shared](const Vector& x) {
    double best = std::numeric_limits<double>::infinity();
    Vector arg = x;
    for (const auto& p : *shared) {
      const double d = (x - p).norm();
      if (d < best) {
        best = d;
        arg = p;
      }
    }
    return arg;
  };
  m.samples = [shared](int nreq) {
    std::vector<Vector> out;
    if (shared->empty()) return out;
    const int stride = std::max<int>(1, static_cast<int>(shared->size()) / nreq);
    for (size_t i = 0; i < shared->size(); i += stride) out.push_back((*shared)[i]);
    return out;
  };
  return m;
}

SingularSetModel SingularSetModel::empty() {
  SingularSetModel m;
  m.exact = true;
  m.description = "empty";
  m.distance = [](const Vector&) { return std::numeric_limits<double>::infinity(); };
  m.project = [](const Vector& x) { return x; };
  m.samples = [](int) { return std::vector<Vector>{}; };
  return m;
}

std::vector<Vector> sample_box(const Box& box, int grid_per_axis, int n_mc,
                               std::uint64_t seed) {
  std::vector<Vector> out;
  const int n = box.dim();
  std::vector<int> idx(n, 0);
  std::function<void(int)> walk = [&](int axis) {
    if (axis == n) {
      Vector x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = box.lo[i] +
               (box.hi[i] - box.lo[i]) * idx[i] / std::max(1, grid_per_axis - 1);
      }
      out.push_back(std::move(x));
      return;
    }
    for (idx[axis] = 0; idx[axis] < grid_per_axis; ++idx[axis]) walk(axis + 1);
  };
  if (grid_per_axis > 0) walk(0);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < n_mc; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uni(rng);
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

// Field scale used for the singular/boundary thresholds.
double field_scale(const ControlAffineSystem& sys) {
  return std::max(1.0, sys.bound_f);
}

}  // namespace

AssumptionAudit audit_assumptions(const ControlAffineSystem& sys, const Constraint& con,
                                  const SingularSetModel& singular,
                                  const AuditConfig& cfg) {
  AssumptionAudit a;
  const Box& box = sys.working_box;
  const double scale = box.scale();
  const double fscale = field_scale(sys);
  const double tol_sing = cfg.tol_singular_rel * fscale;
  a.fd_fallback = !sys.analytic_derivatives || !con.analytic_derivatives;

  const auto samples = sample_box(box, cfg.grid_per_axis, cfg.n_mc, cfg.seed);
  a.n_grid = static_cast<int>(std::pow(cfg.grid_per_axis, box.dim()));
  a.n_mc = cfg.n_mc;

  // ---- (H1): analytic Jacobians vs finite differences, field bound.
  {
    double jerr = 0.0, bexcess = 0.0;
    int count = 0;
    for (const auto& x : samples) {
      if (count++ % 7 != 0) continue;  // thin out; derivative checks are slow
      if (sys.df1) jerr = std::max(jerr, (sys.df1(x) - fd_jacobian(sys.f1, x)).cwiseAbs().maxCoeff());
      if (sys.df2) jerr = std::max(jerr, (sys.df2(x) - fd_jacobian(sys.f2, x)).cwiseAbs().maxCoeff());
      bexcess = std::max(bexcess, sys.f1(x).norm() + sys.f2(x).norm() - sys.bound_f);
    }
    a.h1_jacobian_err = jerr;
    a.h1_bound_excess = bexcess;
    a.h1_pass = jerr <= 1e-4 * fscale && bexcess <= 1e-9 * fscale;
  }

  // ---- singular set samples and regime.
  auto s_pts = singular.samples(cfg.n_s_samples);
  // Keep only points that actually have a small residual (guards model bugs).
  std::erase_if(s_pts, [&](const Vector& x) {
    return boundary_residual(sys, con, x).norm() > std::max(tol_sing, 1e-7 * fscale);
  });
  a.singular_detected = !s_pts.empty();
  a.regime = a.singular_detected ? "second-order" : "first-order-ipc";

  // ---- IPC: min residual over near-boundary samples (including singular
  // points in the boundary band, where the first-order condition degenerates).
  {
    const double band = 0.05 * std::max(1.0, std::abs(con.h(box.center())));
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
      if (std::abs(con.h(x)) > band) continue;
      mn = std::min(mn, boundary_residual(sys, con, x).norm());
    }
    for (const auto& x : s_pts) {
      if (std::abs(con.h(x)) > band) continue;
      mn = std::min(mn, boundary_residual(sys, con, x).norm());
    }
    if (!std::isfinite(mn)) mn = 0.0;
    a.ipc_min_residual = mn;
    a.ipc_pass = mn >= cfg.ipc_gamma_min;
  }

  // ---- (H3): nonvanishing gradient on the boundary band; Hessian Lipschitz
  // ratios probed at shrinking scales (growth flags a C^{2,1} failure).
  {
    double gmin = std::numeric_limits<double>::infinity();
    const double band = 0.05 * std::max(1.0, std::abs(con.h(box.center())));
    for (const auto& x : samples) {
      if (std::abs(con.h(x)) > band) continue;
      gmin = std::min(gmin, con.grad(x).norm());
    }
    if (!std::isfinite(gmin)) gmin = 1.0;  // no boundary in box
    a.h3_grad_min = gmin;

    // Hessian Lipschitz ratios at axis-aligned probes anchored on S (the
    // only place the C^{2,1} regularity can degenerate for our constraints).
    std::vector<Vector> anchors = s_pts;
    if (anchors.empty()) {
      for (size_t i = 0; i < samples.size() && anchors.size() < 8; i += samples.size() / 8 + 1)
        anchors.push_back(samples[i]);
    }
    const std::vector<double> radii = {1e-1 * scale, 1e-2 * scale, 1e-3 * scale};
    std::vector<double> ratio(radii.size(), 0.0);
    for (size_t ri = 0; ri < radii.size(); ++ri) {
      const double r = radii[ri];
      for (size_t ai = 0; ai < anchors.size() && ai < 12; ++ai) {
        for (int i = 0; i < box.dim(); ++i) {
          for (int j = 0; j < box.dim(); ++j) {
            Vector x1 = anchors[ai];
            x1[i] += r;
            Vector x2 = x1;
            x2[j] += 0.3 * r;
            if (!box.contains(x1, 0.0) || !box.contains(x2, 0.0)) continue;
            const double num = (con.hess(x1) - con.hess(x2)).cwiseAbs().maxCoeff();
            ratio[ri] = std::max(ratio[ri], num / (x1 - x2).norm());
          }
        }
      }
    }
    double growth = 0.0;
    for (size_t ri = 0; ri + 1 < radii.size(); ++ri) {
      if (ratio[ri] > 1e-12) growth = std::max(growth, ratio[ri + 1] / ratio[ri]);
    }
    a.h3_hess_growth = growth;
    a.h3_pass = gmin > 1e-6 && growth <= cfg.h3_growth_cap;
  }

  // ---- (H4) and (H5) over the singular samples.
  if (a.singular_detected) {
    double alpha = std::numeric_limits<double>::infinity();
    bool all_nonpos = true;
    for (const auto& x : s_pts) {
      SingularPointRecord rec;
      rec.x = x;
      const Vector g = con.grad(x);
      rec.bracket_normal = g.dot(lie_bracket(sys, x));
      const auto lm = lambda_matrices(sys, con, x);
      rec.s_form = lm.sym;
      rec.cls = classify(lm.sym, 1e-9).cls;
      if (std::abs(rec.bracket_normal) < alpha) {
        alpha = std::abs(rec.bracket_normal);
        a.h4_witness = x;
      }
      if (rec.cls == FormClass::kNotNonPositive) all_nonpos = false;
      if (std::find(a.h5_classes.begin(), a.h5_classes.end(), rec.cls) == a.h5_classes.end())
        a.h5_classes.push_back(rec.cls);
      a.s_records.push_back(std::move(rec));
    }
    a.alpha_hat = alpha;
    a.h4_pass = alpha > cfg.h4_alpha_min;
    a.h5_pass = all_nonpos;
  } else {
    a.alpha_hat = 0.0;
    a.h4_pass = true;  // vacuous; reported via regime
    a.h5_pass = true;
  }

  // ---- (H6): residual / d_S over a feasible collar around S.
  if (a.singular_detected) {
    std::mt19937_64 rng(cfg.seed + 41);
    std::normal_distribution<double> gauss;
    double d0 = std::numeric_limits<double>::infinity();
    const auto radii = logspace(1e-4 * scale, cfg.delta_collar * scale, 10);
    auto consider = [&](const Vector& x) {
      if (!box.contains(x, 0.0)) return;
      if (con.h(x) > 1e-9) return;  // feasible collar only
      const double ds = singular.distance(x);
      if (ds < std::max(tol_sing, 1e-6 * scale) || ds > cfg.delta_collar * scale) return;
      CollarRecord rec;
      rec.x = x;
      rec.d_s = ds;
      rec.residual_norm = boundary_residual(sys, con, x).norm();
      rec.ratio = rec.residual_norm / ds;
      if (rec.ratio < d0) {
        d0 = rec.ratio;
        a.h6_witness = x;
      }
      a.collar_records.push_back(std::move(rec));
    };
    for (const auto& s : s_pts) {
      for (const double r : radii) {
        for (int k = 0; k < cfg.n_collar_dirs; ++k) {
          Vector dir(box.dim());
          for (int i = 0; i < box.dim(); ++i) dir[i] = gauss(rng);
          if (dir.norm() < 1e-12) continue;
          dir.normalize();
          consider(s + r * dir);
        }
        // Axis-aligned probes catch failures confined to coordinate slices.
        for (int i = 0; i < box.dim(); ++i) {
          Vector e = Vector::Zero(box.dim());
          e[i] = 1.0;
          consider(s + r * e);
          consider(s - r * e);
        }
      }
    }
    for (const auto& x : samples) consider(x);
    if (!std::isfinite(d0)) d0 = 0.0;
    a.d0_hat = d0;
    a.h6_pass = d0 >= cfg.h6_d0_min;
  } else {
    a.d0_hat = 0.0;
    a.h6_pass = true;
  }

  return a;
}

InvarianceReport invariance_audit(const ControlAffineSystem& sys, const Constraint& con,
                                  const Diffeomorphism& diffeo,
                                  const std::vector<Vector>& points) {
  InvarianceReport rep;
  const TransformedData td = pushforward(sys, con, diffeo);
  for (const auto& x : points) {
    InvariancePoint p;
    p.x = x;
    const Matrix J = diffeo.jac(x);
    if (std::abs(J.determinant()) < 1e-12) {
      p.skipped = true;
      ++rep.n_skipped;
      rep.points.push_back(std::move(p));
      continue;
    }
    const SymForm2 s = lambda_matrices(sys, con, x).sym;
    const SymForm2 st = lambda_matrices(td.system, td.constraint, diffeo.forward(x)).sym;
    p.discrepancy = std::max({std::abs(s.q11 - st.q11), std::abs(s.q12 - st.q12),
                              std::abs(s.q22 - st.q22)});
    rep.max_discrepancy = std::max(rep.max_discrepancy, p.discrepancy);
    rep.points.push_back(std::move(p));
  }
  return rep;
}

}  // namespace rotnft
