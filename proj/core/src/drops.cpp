#include "rotnft/drops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rotnft {

namespace {

Vector2d rot(double phi, const Vector2d& v) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

// Locate zeros of f in [a, b] by sign scan plus bisection.
std::vector<double> find_zeros(const std::function<double(double)>& f, double a,
                               double b, int scan) {
  std::vector<double> out;
  double prev_t = a, prev_v = f(a);
  for (int i = 1; i <= scan; ++i) {
    const double t = a + (b - a) * i / scan;
    const double v = f(t);
    if ((prev_v < 0 && v > 0) || (prev_v > 0 && v < 0)) {
      double lo = prev_t, hi = t, flo = prev_v;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo < 0 && fm < 0) || (flo > 0 && fm > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    } else if (v == 0.0) {
      out.push_back(t);
    }
    prev_t = t;
    prev_v = v;
  }
  return out;
}

// Composite Simpson over [a, b] split at the sorted interior nodes in cuts.
double simpson_once(const std::function<double(double)>& f, double a, double b,
                    const std::vector<double>& cuts, int panels) {
  std::vector<double> nodes{a};
  for (double c : cuts) {
    if (c > a + 1e-15 * (b - a) && c < b - 1e-15 * (b - a)) nodes.push_back(c);
  }
  nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());

  double total = 0.0;
  for (size_t p = 0; p + 1 < nodes.size(); ++p) {
    const double lo = nodes[p], hi = nodes[p + 1];
    const int n = std::max(2, static_cast<int>(panels * (hi - lo) / (b - a)) & ~1);
    const double h = (hi - lo) / n;
    // Piece endpoints may sit on kinks; evaluate one-sided.
    const double nudge = 1e-9 * h;
    double acc = f(lo + nudge) + f(hi - nudge);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    total += acc * h / 3.0;
  }
  return total;
}

double simpson_richardson(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& cuts, const QuadratureConfig& cfg,
                          const char* what) {
  int panels = cfg.panels;
  double prev = simpson_once(f, a, b, cuts, panels);
  std::ostringstream trace;
  for (int r = 0; r < cfg.max_refinements; ++r) {
    panels *= 2;
    const double cur = simpson_once(f, a, b, cuts, panels);
    const double est = std::abs(cur - prev) / 15.0;
    trace << "panels=" << panels << " value=" << cur << " est=" << est << "\n";
    if (est <= cfg.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw NumericError(std::string(what) + ": quadrature did not reach tolerance",
                     trace.str());
}

}  // namespace

std::vector<double> PlanarCurve::breaks_in(double a, double b) const {
  std::vector<double> out;
  if (breaks.empty()) return out;
  if (period <= 0.0) {
    for (double c : breaks)
      if (c > a && c < b) out.push_back(c);
    return out;
  }
  const long k0 = static_cast<long>(std::floor(a / period)) - 1;
  const long k1 = static_cast<long>(std::ceil(b / period)) + 1;
  for (long k = k0; k <= k1; ++k) {
    for (double c : breaks) {
      const double t = c + k * period;
      if (t > a && t < b) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double area(const PlanarCurve& curve, double t1, double t2,
            const QuadratureConfig& cfg) {
  if (!(t1 < t2)) throw DomainError("area: requires t1 < t2");
  const auto cuts = curve.breaks_in(t1, t2);
  auto f = [&curve](double s) {
    const Vector2d p = curve.position(s);
    const Vector2d v = curve.velocity(s);
    return 0.5 * (v[1] * p[0] - v[0] * p[1]);
  };
  QuadratureConfig c = cfg;
  if (curve.period > 0.0) {
    const int per_period = static_cast<int>(std::ceil((t2 - t1) / curve.period));
    c.panels = std::max(c.panels, 64 * per_period);
  }
  return simpson_richardson(f, t1, t2, cuts, c, "area");
}

namespace {

struct MasterGrid {
  std::vector<double> nodes;  // includes 0, t2, breaks, |v| kinks, t1
};

MasterGrid build_master_grid(const PlanarCurve& curve, double t1, double t2,
                             int uniform_n) {
  MasterGrid g;
  g.nodes = linspace(0.0, t2, uniform_n + 1);
  for (double c : curve.breaks_in(0.0, t2)) g.nodes.push_back(c);
  const int scan = std::max(256, 2 * uniform_n);
  for (int comp = 0; comp < 2; ++comp) {
    auto f = [&curve, comp](double s) { return curve.velocity(s)[comp]; };
    for (double z : find_zeros(f, 0.0, t2, scan)) g.nodes.push_back(z);
  }
  if (t1 > 0.0) g.nodes.push_back(t1);
  std::sort(g.nodes.begin(), g.nodes.end());
  g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end(),
                            [t2](double x, double y) { return y - x < 1e-14 * t2; }),
                g.nodes.end());
  return g;
}

// One sweep of the nested excess integrals over a master grid. Returns
// Exc(0..node) at every grid node. The inner weight is the accumulated arc
// length (equal to the parameter for arc-length curves), which keeps the
// functional parameterization invariant. Piece endpoints are nudged inward so
// one-sided velocity limits are used at generator corners.
std::vector<double> excess_sweep(const PlanarCurve& curve, const MasterGrid& g) {
  const auto& ts = g.nodes;
  const size_t n = ts.size();
  std::vector<double> exc(n, 0.0);
  double i1 = 0.0, i2 = 0.0;  // cumulative inner integrals
  double al = 0.0;            // cumulative arc length

  for (size_t k = 0; k + 1 < n; ++k) {
    const double a = ts[k], b = ts[k + 1];
    const double h = b - a;
    const double nudge = 1e-9 * h;

    // Eighth-point stencil; endpoints nudged inward for one-sided limits.
    Vector2d v[9];
    for (int j = 0; j <= 8; ++j) {
      double t = a + h * j / 8.0;
      if (j == 0) t = a + nudge;
      if (j == 8) t = b - nudge;
      v[j] = curve.velocity(t);
    }
    // Arc length at even stencil points (Simpson per quarter cell).
    double als[9];
    als[0] = al;
    for (int j = 0; j + 2 <= 8; j += 2) {
      als[j + 2] = als[j] + (h / 4.0) / 6.0 *
                               (v[j].norm() + 4.0 * v[j + 1].norm() + v[j + 2].norm());
    }
    auto il = [&](int j, int comp) { return als[j] * std::abs(v[j][comp]); };
    // Inner integrals at the midpoint and right node (Simpson per half cell).
    const double i1_mid = i1 + (h / 2.0) / 6.0 * (il(0, 0) + 4.0 * il(2, 0) + il(4, 0));
    const double i2_mid = i2 + (h / 2.0) / 6.0 * (il(0, 1) + 4.0 * il(2, 1) + il(4, 1));
    const double i1_b =
        i1_mid + (h / 2.0) / 6.0 * (il(4, 0) + 4.0 * il(6, 0) + il(8, 0));
    const double i2_b =
        i2_mid + (h / 2.0) / 6.0 * (il(4, 1) + 4.0 * il(6, 1) + il(8, 1));

    // Outer integrand (I1 + I2)(s) (|v1| + |v2|)(s), Simpson per cell.
    auto wgt = [](const Vector2d& w) { return std::abs(w[0]) + std::abs(w[1]); };
    const double ga = (i1 + i2) * wgt(v[0]);
    const double gm = (i1_mid + i2_mid) * wgt(v[4]);
    const double gb = (i1_b + i2_b) * wgt(v[8]);
    exc[k + 1] = exc[k] + h / 6.0 * (ga + 4.0 * gm + gb);
    i1 = i1_b;
    i2 = i2_b;
    al = als[8];
  }
  return exc;
}

}  // namespace

double excess(const PlanarCurve& curve, double t1, double t2,
              const QuadratureConfig& cfg) {
  if (!(t1 < t2) || t1 < 0.0) throw DomainError("excess: requires 0 <= t1 < t2");
  int uniform_n = cfg.panels;
  if (curve.period > 0.0) {
    uniform_n = std::max(uniform_n,
                         64 * static_cast<int>(std::ceil(t2 / curve.period)));
  }

  auto run = [&](int n) {
    const MasterGrid g = build_master_grid(curve, t1, t2, n);
    const auto exc = excess_sweep(curve, g);
    // value at t2 minus value at t1 (both are grid nodes)
    double at1 = 0.0;
    if (t1 > 0.0) {
      const auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), t1 - 1e-13 * t2);
      at1 = exc[static_cast<size_t>(it - g.nodes.begin())];
    }
    return exc.back() - at1;
  };

  double prev = run(uniform_n);
  std::ostringstream trace;
  for (int r = 0; r < cfg.max_refinements; ++r) {
    uniform_n *= 2;
    const double cur = run(uniform_n);
    const double est = std::abs(cur - prev) / 15.0;
    trace << "cells=" << uniform_n << " value=" << cur << " est=" << est << "\n";
    if (est <= cfg.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw NumericError("excess: quadrature did not reach tolerance", trace.str());
}

CumulativeSweep cumulative_area_excess(const PlanarCurve& curve, double t_max,
                                       int samples) {
  const MasterGrid g = build_master_grid(curve, 0.0, t_max, samples);
  CumulativeSweep out;
  out.t = g.nodes;
  out.excess = excess_sweep(curve, g);
  out.area.assign(g.nodes.size(), 0.0);
  auto f = [&curve](double s) {
    const Vector2d p = curve.position(s);
    const Vector2d v = curve.velocity(s);
    return 0.5 * (v[1] * p[0] - v[0] * p[1]);
  };
  for (size_t k = 0; k + 1 < g.nodes.size(); ++k) {
    const double a = g.nodes[k], b = g.nodes[k + 1];
    const double m = 0.5 * (a + b);
    const double nudge = 1e-9 * (b - a);
    out.area[k + 1] =
        out.area[k] + (b - a) / 6.0 * (f(a + nudge) + 4.0 * f(m) + f(b - nudge));
  }
  return out;
}

double DropCurve::area_to(double t, const QuadratureConfig& cfg) const {
  if (area_closed) return area_closed(t);
  if (t == 0.0) return 0.0;
  if (t > 0.0) return area(curve, 0.0, t, cfg);
  return -area(curve, t, 0.0, cfg);
}

DropCurve make_circle_drop(double tau0, double phase) {
  if (!(tau0 > 0.0)) throw DomainError("make_circle_drop: tau0 must be positive");
  DropCurve d;
  d.period = tau0;
  d.phase = phase;
  d.half_amplitude = 0.5 * kPi;
  d.lip = 2.0 * kPi / tau0;
  d.kind = DropKind::kCircleLike;

  const double w = 2.0 * kPi / tau0;
  d.curve.period = tau0;
  d.curve.velocity = [w, phase](double t) {
    const double th = w * t - 0.5 * kPi;
    return rot(phase, Vector2d{std::cos(th), std::sin(th)});
  };
  d.curve.position = [w, phase, tau0](double t) {
    const double th = w * t;
    return rot(phase, Vector2d{tau0 / (2.0 * kPi) * (1.0 - std::cos(th)),
                               -tau0 / (2.0 * kPi) * std::sin(th)});
  };
  d.area_closed = [tau0](double t) {
    return tau0 * (2.0 * kPi * t - tau0 * std::sin(2.0 * kPi * t / tau0)) /
           (8.0 * kPi * kPi);
  };
  return d;
}

DropCurve make_pointed_drop(double tau0, double phase, double beta) {
  if (!(tau0 > 0.0)) throw DomainError("make_pointed_drop: tau0 must be positive");
  if (!(beta > 0.0 && beta < 0.5 * kPi)) {
    throw DomainError("make_pointed_drop: beta must lie in (0, pi/2)");
  }
  const double P = 0.5 * kPi * tau0 / beta;   // period of the underlying arc
  const double pb = 0.5 * tau0;               // P_beta; junction time

  DropCurve d;
  d.period = tau0;
  d.phase = phase;
  d.half_amplitude = beta;
  d.lip = 2.0 * kPi / P;  // per smooth arc; r jumps direction at the corners
  d.kind = DropKind::kPointed;
  d.curve.period = tau0;
  d.curve.breaks = {0.0, pb};

  auto wrap = [tau0](double t) {
    double s = std::fmod(t, tau0);
    if (s < 0.0) s += tau0;
    return s;
  };
  auto arc_pos = [P, beta](double t) {
    const double a = kPi * t / P;
    return Vector2d{P / kPi * std::cos(a - beta) * std::sin(a),
                    P / kPi * std::sin(a - beta) * std::sin(a)};
  };
  auto arc_vel = [P, beta](double t) {
    const double a = 2.0 * kPi * t / P - beta;
    return Vector2d{std::cos(a), std::sin(a)};
  };

  d.curve.position = [wrap, arc_pos, pb, tau0, phase](double t) {
    const double s = wrap(t);
    Vector2d p;
    if (s <= pb) {
      p = arc_pos(s);
    } else {
      p = arc_pos(tau0 - s);
      p[1] = -p[1];
    }
    return rot(phase, p);
  };
  d.curve.velocity = [wrap, arc_vel, pb, tau0, phase](double t) {
    const double s = wrap(t);
    Vector2d v;
    if (s < pb) {
      v = arc_vel(s);
    } else {
      v = arc_vel(tau0 - s);
      v[0] = -v[0];
    }
    return rot(phase, v);
  };

  // Piecewise closed-form area: the first arc behaves like the circle with
  // period P; the reflected arc mirrors it.
  auto a0 = [P](double t) {
    return P / (4.0 * kPi) * (t - P / (2.0 * kPi) * std::sin(2.0 * kPi * t / P));
  };
  const double half = a0(pb);
  d.area_closed = [wrap, a0, pb, tau0, half](double t) {
    const double k = std::floor(t / tau0);
    const double s = wrap(t);
    const double in_period = s <= pb ? a0(s) : 2.0 * half - a0(tau0 - s);
    return k * 2.0 * half + in_period;
  };
  return d;
}

DropCertificate validate_drop(const DropCurve& drop, const ValidateConfig& cfg) {
  DropCertificate cert;
  const double tau0 = drop.period;
  const int n = cfg.samples;
  cert.samples_used = n;
  cert.t_bar = cfg.t_bar > 0.0 ? cfg.t_bar : tau0;
  auto fail = [&cert](const std::string& clause) {
    if (std::find(cert.violated.begin(), cert.violated.end(), clause) ==
        cert.violated.end())
      cert.violated.push_back(clause);
  };

  // (1) arc-length parameterization
  for (int i = 0; i < n; ++i) {
    const double t = tau0 * (i + 0.5) / n;
    if (std::abs(drop.r(t).norm() - 1.0) > 1e-6) {
      fail("1:arc_length");
      break;
    }
  }

  // (2) R(0) = 0 and r(0) = (cos(phi - beta), sin(phi - beta))
  {
    const Vector2d r0 = drop.r(0.0);
    const Vector2d want{std::cos(drop.phase - drop.half_amplitude),
                        std::sin(drop.phase - drop.half_amplitude)};
    if (drop.R(0.0).norm() > cfg.tol || (r0 - want).norm() > 1e-9) fail("2:initial");
  }

  // (3) periodicity, closedness, Lipschitz generator between kinks
  {
    for (int i = 0; i <= 16; ++i) {
      const double t = tau0 * i / 16.0;
      if ((drop.R(t + tau0) - drop.R(t)).norm() > 1e-7 * std::max(1.0, tau0)) {
        fail("3:periodicity");
        break;
      }
    }
    // closedness: int_0^tau0 r = R(tau0) - R(0)
    if (drop.R(tau0).norm() > 1e-7 * std::max(1.0, tau0)) fail("3:periodicity");

    // Difference quotients between kinks (the period endpoints are kinks of
    // the periodic extension for pointed generators).
    const auto cuts = drop.curve.breaks_in(-0.5 * tau0 / n, tau0 + 0.5 * tau0 / n);
    double lip_obs = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double t0 = tau0 * i / n, t1 = tau0 * (i + 1) / n;
      bool crosses = false;
      for (double c : cuts)
        if (c >= t0 && c <= t1) crosses = true;
      if (crosses) continue;
      lip_obs = std::max(lip_obs, (drop.r(t1) - drop.r(t0)).norm() / (t1 - t0));
    }
    if (drop.lip > 0.0 && lip_obs > drop.lip * (1.0 + 1e-3)) fail("3:lipschitz");
  }

  // (4) strictly increasing area dominating the excess; cubic lower bound
  {
    const CumulativeSweep sweep = cumulative_area_excess(drop.curve, tau0, n);
    cert.area_monotone = true;
    for (size_t k = 0; k + 1 < sweep.t.size(); ++k) {
      if (sweep.area[k + 1] <= sweep.area[k] - 1e-14 * std::max(1.0, tau0)) {
        cert.area_monotone = false;
        break;
      }
    }
    const double sigma_floor = cfg.sigma_floor_rel * tau0;
    double c_r = 0.0, limit_ratio = 0.0;
    double cubic = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k < sweep.t.size(); ++k) {
      const double t = sweep.t[k];
      const double a = drop.area_closed ? drop.area_closed(t) : sweep.area[k];
      if (std::abs(a) > 0.0 && limit_ratio == 0.0) {
        limit_ratio = sweep.excess[k] / std::abs(a);  // smallest sampled sigma
      }
      if (t >= sigma_floor && std::abs(a) > 0.0) {
        c_r = std::max(c_r, sweep.excess[k] / std::abs(a));
      }
      if (t >= 1e-3 * cert.t_bar && t <= cert.t_bar && a > 0.0) {
        cubic = std::min(cubic, a / (t * t * t));
      }
    }
    cert.c_r = c_r;
    cert.limit_ratio_near_zero = limit_ratio;
    cert.cubic_constant = std::isfinite(cubic) ? cubic : 0.0;
    if (!cert.area_monotone || c_r <= 0.0 || c_r > cfg.cr_cap ||
        cert.cubic_constant <= 0.0) {
      fail("4:area_excess");
    }
  }

  // (5) sector condition on the open period
  for (int i = 1; i < n; ++i) {
    const double t = tau0 * i / n;
    const Vector2d p = drop.R(t);
    if (p.norm() < 1e-12 * std::max(1.0, tau0)) continue;
    const double arg = std::atan2(p[1], p[0]);
    if (std::abs(wrap_angle(arg - drop.phase)) > drop.half_amplitude + 1e-9) {
      fail("5:sector");
      break;
    }
  }

  cert.pass = cert.violated.empty();
  return cert;
}

bool adapted_to(const DropCurve& drop, const SymForm2& s, double tol) {
  const FormGeometry g = form_geometry(s);
  const double dphi = wrap_direction(drop.phase - g.phi);
  return std::abs(dphi) <= tol && drop.half_amplitude <= g.beta + tol;
}

}  // namespace rotnft
