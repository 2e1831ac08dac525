#include "rotnft/nft.hpp"

#include <algorithm>
#include <cmath>

namespace rotnft {

const char* to_string(SelectionCase c) {
  switch (c) {
    case SelectionCase::kH5i: return "H5i";
    case SelectionCase::kH5iiA: return "H5ii_A";
    case SelectionCase::kH5iiB: return "H5ii_B";
    case SelectionCase::kFarFromS: return "far_from_S";
  }
  return "?";
}

DropSelection select_drop_params(const ControlAffineSystem& sys, const Constraint& con,
                                 const SingularSetModel& singular, const Vector& x,
                                 double eps, double tau0) {
  DropSelection out;
  const Vector2d w = boundary_residual(sys, con, x);
  const double wn = w.norm();
  out.psi_x = wn > 0.0 ? std::atan2(w[1], w[0]) : 0.0;
  out.d_s = singular.distance(x);
  out.inward = wn > 1e-14 ? Vector2d(-w / wn) : Vector2d::Zero();

  if (out.d_s >= eps) {
    out.sel = SelectionCase::kFarFromS;
    out.anchor = x;
    // Unused by the first-order leg; kept so downstream reporting is uniform.
    out.drop = make_circle_drop(tau0, 0.0);
    const double b = con.grad(x).dot(lie_bracket(sys, x));
    out.sign_omega = b > 0.0 ? -1 : 1;
    out.k_x = 1.0;
    return out;
  }

  const Vector y0 = out.d_s > 0.0 ? singular.project(x) : x;
  out.anchor = y0;
  const double b = con.grad(y0).dot(lie_bracket(sys, y0));
  out.sign_omega = b >= 0.0 ? -1 : 1;

  const SymForm2 s_anchor = lambda_matrices(sys, con, y0).sym;
  const Classification cls0 = classify(s_anchor, 1e-9);
  if (cls0.cls == FormClass::kNotNonPositive) {
    throw H5ViolationError("assumption (H5) violated at the S-projection", s_anchor);
  }

  const double wtol = std::max(1e-12, 1e-9 * wn);
  if (cls0.cls == FormClass::kIndefinite) {
    const SymForm2 s_here = lambda_matrices(sys, con, x).sym;
    if (classify(s_here, 1e-9).cls == FormClass::kNotNonPositive) {
      throw H5ViolationError("assumption (H5) violated at x", s_here);
    }
    // Use the local form when it is still indefinite, else the anchor's.
    const SymForm2& s_use =
        classify(s_here, 1e-9).cls == FormClass::kIndefinite ? s_here : s_anchor;
    const FormGeometry g = form_geometry(s_use);

    const Vector2d edge{std::cos(g.phi - g.beta), std::sin(g.phi - g.beta)};
    const double dot = w.dot(edge);
    double phi, beta;
    if (std::abs(dot) > wtol) {
      out.sel = SelectionCase::kH5iiA;
      beta = g.beta;
      phi = dot < 0.0 ? g.phi : g.phi + kPi;  // antipodal phase flips r(0)
    } else {
      out.sel = SelectionCase::kH5iiB;
      beta = 0.5 * g.beta;
      const Vector2d half{std::cos(g.phi - beta), std::sin(g.phi - beta)};
      phi = w.dot(half) <= 0.0 ? g.phi : g.phi + kPi;
    }
    out.drop = make_pointed_drop(tau0, wrap_angle(phi), beta);
  } else {
    // (H5)(i): the form places no restriction; point r(0) straight inward.
    out.sel = SelectionCase::kH5i;
    double phi = 0.0;
    if (wn > 1e-14) phi = std::atan2(-w[1], -w[0]) + 0.5 * kPi;
    out.drop = make_circle_drop(tau0, wrap_angle(phi));
  }

  out.k_x = wn > 1e-14 ? -w.dot(out.drop.r(0.0)) / wn : 1.0;
  return out;
}

namespace {

struct LegSearchResult {
  bool ok = false;
  ControlFunction control;
  Process proc;
  LegRecord rec;
  LegAttempt best;
};

double measure_descent_constant(const ControlAffineSystem& sys, const Constraint& con,
                                const DropSelection& sel, const Vector& anchor,
                                double tau0, double horizon) {
  const double tau_probe = std::min(0.2, 0.25 * horizon);
  if (sel.sel == SelectionCase::kFarFromS) {
    // First-order regime: h decays linearly at rate |w|^2 / max(|w|, 1).
    const Vector2d w = boundary_residual(sys, con, anchor);
    return w.squaredNorm() / std::max(w.norm(), 1.0);
  }
  const double omega = sel.sign_omega * tau0 / tau_probe;
  try {
    const DescentReport rep =
        descent_check(sys, con, sel.drop, anchor, omega, tau_probe);
    if (rep.descent && rep.c_measured > 0.0) return rep.c_measured;
    if (rep.alpha_x > 0.0) return rep.alpha_x;
  } catch (const Error&) {
  }
  return 1e-3;
}

// Crude Lipschitz estimate of the Lambda entries around x; feeds the
// omega floor 2 L C_R / alpha.
double estimate_lambda_lipschitz(const ControlAffineSystem& sys, const Constraint& con,
                                 const Vector& x, double radius) {
  const auto base = lambda_matrices(sys, con, x);
  double lip = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    for (const double s : {radius, -radius}) {
      Vector y = x;
      y[i] += s;
      const auto lm = lambda_matrices(sys, con, y);
      lip = std::max(lip, (lm.lambda - base.lambda).cwiseAbs().maxCoeff() / radius);
    }
  }
  return lip;
}

}  // namespace

NFTOutcome construct_nft(const ControlAffineSystem& sys, const Constraint& con,
                         const SingularSetModel& singular, const Process& reference,
                         const NFTConfig& cfg) {
  NFTOutcome out;
  const double T = reference.horizon();
  const ViolationReport ref_vio = violation(reference, con);
  out.result.d = ref_vio.d;
  out.result.tau1 = ref_vio.tau1;

  if (con.h(reference.state(0)) > 1e-12) {
    throw DomainError("construct_nft: reference must start inside the constraint");
  }
  if (ref_vio.d > cfg.d_max) {
    throw DomainError("construct_nft: violation extent too large for the construction");
  }

  if (ref_vio.feasible) {
    out.success = true;
    out.result.y = reference;
    out.result.w = reference.control;
    out.result.feasible = true;
    out.result.tau_d = 0.0;
    out.result.margin = -max_h_after(reference, con, 0.0);
    return out;
  }

  ControlFunction control = reference.control;
  Process proc = reference;
  const double progress_min = cfg.progress_min_rel * T;

  for (int leg = 0; leg < cfg.leg_budget; ++leg) {
    const double tau_cross =
        leg == 0 ? ref_vio.tau1 : first_violation_after(proc, con, 0.0);
    if (!std::isfinite(tau_cross)) break;  // feasible everywhere
    if (tau_cross >= T - 1e-12) break;     // nothing left to fix

    // Splice at the last grid node at or before the crossing whose state is
    // still feasible; the node state is exact and h <= 0 there, which keeps
    // the certificate free of interpolation sign noise. The node sits within
    // one step of tau1.
    int i_s = 0;
    while (i_s + 1 < proc.size() && proc.t[i_s + 1] <= tau_cross + 1e-15) ++i_s;
    while (i_s > 0 && con.h(proc.state(i_s)) > 0.0) --i_s;
    const double tau_v = proc.t[i_s];
    const Vector anchor = proc.state(i_s);
    DropSelection sel;
    try {
      sel = select_drop_params(sys, con, singular, anchor, cfg.eps, cfg.tau0);
    } catch (const H5ViolationError& e) {
      out.obstruction.message = std::string("drop selection failed: ") + e.what();
      out.obstruction.t_splice = tau_v;
      out.obstruction.legs_done = leg;
      return out;
    }

    const double d_rem = std::max(max_h_after(proc, con, tau_v), 0.0);
    const double alpha_hat =
        measure_descent_constant(sys, con, sel, anchor, cfg.tau0, T);
    double tau_seed;
    if (sel.sel == SelectionCase::kFarFromS) {
      tau_seed = std::min(2.0 * d_rem / std::max(alpha_hat, 1e-6), 1.0);
    } else {
      tau_seed = std::min(std::sqrt(2.0 * d_rem / (cfg.gamma_hat * alpha_hat)), 1.0);
    }
    tau_seed = std::min(tau_seed, T - tau_v);

    // omega floor from the proof-style bound 2 L C_R / alpha.
    double omega_floor = 0.0;
    if (sel.sel != SelectionCase::kFarFromS) {
      const double lam_lip = estimate_lambda_lipschitz(sys, con, anchor, 0.05);
      const double alpha_loc =
          std::abs(con.grad(anchor).dot(lie_bracket(sys, anchor)));
      const DropCertificate cert = validate_drop(sel.drop, {.samples = 256});
      if (alpha_loc > 1e-9) {
        omega_floor = 2.0 * lam_lip * cert.c_r / alpha_loc;
      }
    }

    LegSearchResult found;
    LegAttempt best_attempt;
    int attempts = 0;
    for (int enlarge = 0; enlarge < cfg.max_attempts && !found.ok; ++enlarge) {
      // Alternate enlarging tau (even attempts) and omega (odd attempts).
      const double tau_ins =
          std::min(tau_seed * std::pow(2.0, enlarge / 2), std::max(T - tau_v, 1e-6));
      int k = 1;
      if (omega_floor > 0.0) {
        k = std::max(1, static_cast<int>(std::ceil(omega_floor * tau_ins / cfg.tau0)));
      }
      k <<= (enlarge % 2);  // odd attempts double the rotation count

      ControlFunction cand_control;
      if (sel.sel == SelectionCase::kFarFromS) {
        const Vector2d w = boundary_residual(sys, con, anchor);
        const Vector2d u_in = -w / std::max(w.norm(), 1.0);
        cand_control = splice_with_insert(
            control, tau_v, tau_ins, [u_in](double) { return u_in; }, 0.0, "inward");
      } else {
        const double omega = sel.sign_omega * k * cfg.tau0 / tau_ins;
        const RotationalControl u = make_rotational(sel.drop, omega);
        const double t0 = tau_v;  // rotation phase starts at the splice
        cand_control = splice_with_insert(
            control, tau_v, tau_ins, [u, t0](double t) { return u(t - t0); },
            u.period(), "rotational");
      }
      ++attempts;

      Process cand;
      try {
        cand = integrate_suffix(sys, proc, cand_control, tau_v, T, cfg.policy);
      } catch (const ConfigError&) {
        continue;  // step budget; try a different shape
      }
      const double next_vio = first_violation_after(cand, con, tau_v + 1e-12);
      LegAttempt att;
      att.tau_ins = tau_ins;
      att.omega = sel.sel == SelectionCase::kFarFromS
                      ? 0.0
                      : sel.sign_omega * k * cfg.tau0 / tau_ins;
      att.first_violation = std::isfinite(next_vio) ? next_vio : T;
      att.max_h = max_h_after(cand, con, tau_v);
      if (att.first_violation > best_attempt.first_violation) best_attempt = att;

      const bool certified =
          !std::isfinite(next_vio) ||
          next_vio >= tau_v + std::max(2.0 * tau_ins, progress_min);
      if (certified) {
        found.ok = true;
        found.control = std::move(cand_control);
        found.proc = std::move(cand);
        found.rec = LegRecord{tau_v,
                              tau_ins,
                              att.omega,
                              k,
                              sel.sel,
                              attempts,
                              att.first_violation};
      }
    }

    if (!found.ok) {
      out.obstruction.message =
          "construction failed: no (tau, omega) candidate certified h < 0 past the splice";
      out.obstruction.best = best_attempt;
      out.obstruction.t_splice = tau_v;
      out.obstruction.legs_done = leg;
      return out;
    }

    control = std::move(found.control);
    proc = std::move(found.proc);
    out.result.legs.push_back(found.rec);
    out.result.total_delay += found.rec.tau_ins;
    if (leg == 0) out.result.tau_d = found.rec.tau_ins;
  }

  // Final certificate over the whole horizon.
  const double final_vio = first_violation_after(proc, con, out.result.tau1 + 1e-12);
  if (std::isfinite(final_vio)) {
    out.obstruction.message = "construction failed: residual violation at t = " +
                              std::to_string(final_vio);
    out.obstruction.t_splice = final_vio;
    out.obstruction.legs_done = static_cast<int>(out.result.legs.size());
    return out;
  }

  out.success = true;
  out.result.feasible = true;
  out.result.y = std::move(proc);
  out.result.w = control;

  {
    // Margin: min of -h over (tau1, T], skipping the splice instant itself.
    double margin = std::numeric_limits<double>::infinity();
    const Process& y = out.result.y;
    for (int i = 0; i < y.size(); ++i) {
      if (y.t[i] <= out.result.tau1 + 1e-12) continue;
      margin = std::min(margin, -con.h(y.state(i)));
    }
    out.result.margin = std::isfinite(margin) ? margin : 0.0;
  }

  if (cfg.collect_distances) {
    const Process& y = out.result.y;
    const Process& xr = reference;
    const int n_probe = 4096;
    double sup = 0.0;
    for (int i = 0; i <= n_probe; ++i) {
      const double t = T * i / n_probe;
      sup = std::max(sup, (y.state_at(t) - xr.state_at(t)).norm());
    }
    out.result.sup_dist = sup;

    // L1 gaps, resolved against the fastest oscillation present.
    const double pmin = std::min(xr.control.min_period() > 0 ? xr.control.min_period()
                                                             : T,
                                 control.min_period() > 0 ? control.min_period() : T);
    const long m = std::min<long>(2'000'000L, std::max<long>(
        n_probe, 24L * std::lround(std::ceil(T / std::max(pmin, 1e-9)))));
    const double ht = T / static_cast<double>(m);
    double l1u = 0.0, l1dx = 0.0, mod_u = 0.0, mod_dx = 0.0;
    const double tau_d = out.result.total_delay;
    const double t_mod_from = out.result.tau1 + tau_d;
    for (long i = 0; i < m; ++i) {
      const double t = (i + 0.5) * ht;
      const Vector2d du = control(t) - xr.control(t);
      l1u += du.norm() * ht;
      const Vector yx = y.state_at(t);
      const Vector xx = xr.state_at(t);
      l1dx += (sys.rhs(yx, control(t)) - sys.rhs(xx, xr.control(t))).norm() * ht;
      if (t > t_mod_from && tau_d > 0.0) {
        mod_u += (xr.control(t - tau_d) - xr.control(t)).norm() * ht;
        mod_dx += (sys.rhs(xr.state_at(t - tau_d), xr.control(t - tau_d)) -
                   sys.rhs(xx, xr.control(t)))
                      .norm() *
                  ht;
      }
    }
    out.result.l1_control_gap = l1u;
    out.result.l1_deriv_gap = l1dx;
    out.result.delayed_control_modulus = mod_u;
    out.result.delayed_deriv_modulus = mod_dx;
  }
  return out;
}

EstimateCertificate verify_estimates(
    const std::vector<std::pair<Process, NFTResult>>& sweep) {
  EstimateCertificate cert;
  std::vector<double> lx, ly;
  for (const auto& [ref, res] : sweep) {
    EstimateRow row;
    row.d = res.d;
    row.sup_dist = res.sup_dist;
    row.l1_control = res.l1_control_gap;
    row.l1_deriv = res.l1_deriv_gap;
    row.w11 = res.l1_deriv_gap;  // y(0) = x(0), so the W11 gap is the L1 one
    row.delayed_control_modulus = res.delayed_control_modulus;
    row.delayed_deriv_modulus = res.delayed_deriv_modulus;
    cert.rows.push_back(row);
    if (row.d > 0.0 && row.sup_dist > 0.0) {
      lx.push_back(std::log(row.d));
      ly.push_back(std::log(row.sup_dist));
      cert.K = std::max(cert.K, row.sup_dist / std::sqrt(row.d));
      cert.Kprime = std::max(cert.Kprime, row.w11 / std::sqrt(row.d));
    }
  }
  if (lx.size() >= 2) cert.slope = fit_slope(lx, ly);
  return cert;
}

}  // namespace rotnft
