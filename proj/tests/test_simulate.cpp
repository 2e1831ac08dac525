#include "rotnft/simulate.hpp"

#include "rotnft/geometry.hpp"
#include "rotnft/scenarios.hpp"

#include "doctest.h"

#include <cmath>

using namespace rotnft;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// (cos wt, sin wt) as a control; equals the circle drop of period 2 pi and
// phase pi/2 traversed at angular velocity w.
ControlFunction circle_control(double w, double T) {
  return ControlFunction::single(
      [w](double t) { return Vector2d{std::cos(w * t), std::sin(w * t)}; }, T,
      2.0 * kPi / std::abs(w), "cos-sin");
}

double brockett_sup_error(double omega, double step) {
  const Scenario s = make_scenario("brockett_flat");
  StepPolicy pol;
  pol.base_step = step;
  pol.min_steps_per_period = 1;  // the step is prescribed by the caller here
  const Process p =
      integrate(s.system, circle_control(omega, 1.0), Vector::Zero(3), 1.0, pol);
  double err = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    err = std::max(err,
                   (p.state(i) - brockett_closed_form(omega, p.t[i])).norm());
  }
  return err;
}

}  // namespace

TEST_CASE("Brockett trajectory matches the closed form to 1e-8") {
  for (const double omega : {2.0 * kPi, -2.0 * kPi, 20.0 * kPi, -20.0 * kPi}) {
    CHECK(brockett_sup_error(omega, 1e-4) < 1e-8);
  }
}

TEST_CASE("zero control freezes the state") {
  const Scenario s = make_scenario("brockett_flat");
  auto ctrl = ControlFunction::single([](double) { return Vector2d::Zero(); }, 1.0);
  const Vector x0 = vec3(0.3, -0.4, 0.2);
  const Process p = integrate(s.system, ctrl, x0, 1.0);
  CHECK((p.state(p.size() - 1) - x0).norm() == doctest::Approx(0.0));
}

TEST_CASE("step halving reduces the closed-form error about sixteenfold") {
  std::vector<double> lx, ly;
  for (const double step : {4e-3, 2e-3, 1e-3, 5e-4}) {
    lx.push_back(std::log(step));
    ly.push_back(std::log(brockett_sup_error(2.0 * kPi, step)));
  }
  const double slope = fit_slope(lx, ly);
  CHECK(slope > 3.7);
  CHECK(slope < 4.3);
  const double r = brockett_sup_error(2.0 * kPi, 2e-3) /
                   brockett_sup_error(2.0 * kPi, 1e-3);
  CHECK(r > 10.0);
  CHECK(r < 22.0);
}

TEST_CASE("under-resolved rotation is a configuration error") {
  const Scenario s = make_scenario("brockett_flat");
  StepPolicy pol;
  pol.base_step = 1e-2;  // the 2 pi / 100 period needs ~1e-3 steps
  CHECK_THROWS_AS(
      integrate(s.system, circle_control(100.0, 1.0), Vector::Zero(3), 1.0, pol),
      ConfigError);
}

TEST_CASE("violation report on the flat constraint") {
  const Scenario s = make_scenario("brockett_flat");
  const double w = 8.0;
  StepPolicy fine;
  fine.min_steps_per_period = 1000;

  SUBCASE("positive rotation violates immediately") {
    const Process p =
        integrate(s.system, circle_control(w, 1.0), Vector::Zero(3), 1.0, fine);
    const ViolationReport rep = violation(p, s.constraint);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.tau1 == doctest::Approx(0.0).epsilon(1e-8));
    const double hT = (w * 1.0 - std::sin(w * 1.0)) / (w * w);
    CHECK(rep.d == doctest::Approx(hT).epsilon(1e-8));
  }

  SUBCASE("negative rotation stays feasible") {
    const Process p =
        integrate(s.system, circle_control(-w, 1.0), Vector::Zero(3), 1.0, fine);
    const ViolationReport rep = violation(p, s.constraint);
    CHECK(rep.feasible);
    CHECK(rep.tau1 == doctest::Approx(1.0));
    CHECK(rep.d == 0.0);
  }

  SUBCASE("interior trajectory is feasible with tau1 = T") {
    const Process p = integrate(s.system, circle_control(w, 1.0),
                                vec3(0.0, 0.0, -10.0), 1.0, fine);
    const ViolationReport rep = violation(p, s.constraint);
    CHECK(rep.feasible);
    CHECK(rep.tau1 == doctest::Approx(1.0));
  }

  SUBCASE("interior start crossing later: tau1 located by bisection") {
    const double h0 = -1e-3;
    const Process p = integrate(s.system, circle_control(w, 1.0),
                                vec3(0.0, 0.0, h0), 1.0, fine);
    const ViolationReport rep = violation(p, s.constraint);
    CHECK_FALSE(rep.feasible);
    // Crossing of (wt - sin wt)/w^2 = 1e-3.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((w * mid - std::sin(w * mid)) / (w * w) + h0 > 0 ? hi : lo) = mid;
    }
    CHECK(rep.tau1 == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
  }
}

TEST_CASE("bracket displacement against the integrator closed form") {
  const Scenario s = make_scenario("brockett_flat");
  const DropCurve drop = make_circle_drop(1.0, 0.0);
  StepPolicy fine;
  fine.min_steps_per_period = 400;

  const auto rep = bracket_displacement_check(s.system, drop, Vector::Zero(3), 0.1,
                                              1, -1, 7, fine);
  // Leading term with omega < 0 pushes along [f2, f1] = (0, 0, -2).
  CHECK(rep.leading_term[2] < 0.0);
  CHECK(rep.leading_term[2] ==
        doctest::Approx(-0.1 * 0.1 * drop.area_to(1.0) * 2.0).epsilon(1e-10));
  // The integrator fields have constant Df f, so the remainder vanishes and
  // the residual is integrator noise only.
  for (size_t i = 0; i < rep.taus.size(); ++i) {
    CHECK(rep.residual_norms[i] < 1e-9);
  }
}

TEST_CASE("bracket displacement remainder has cubic order on curved fields") {
  const Scenario s = make_scenario("brockett_nonlinear");
  const DropCurve drop = make_circle_drop(1.0, 0.0);
  StepPolicy fine;
  fine.min_steps_per_period = 400;
  const auto rep = bracket_displacement_check(s.system, drop, vec3(0.2, 0.1, -0.6),
                                              0.1, 1, -1, 7, fine);
  CHECK(rep.fitted_exponent >= 2.8);
  CHECK(rep.fitted_B > 0.0);
  for (size_t i = 0; i < rep.taus.size(); ++i) {
    CHECK(rep.residual_norms[i] <=
          rep.fitted_B * std::pow(rep.taus[i], 3) * (1 + 1e-9));
  }
}

TEST_CASE("commuting constant fields return exactly after whole periods") {
  Scenario s = make_scenario("brockett_flat");
  s.system.f1 = [](const Vector&) { return vec3(1.0, 0.0, 0.0); };
  s.system.f2 = [](const Vector&) { return vec3(0.0, 1.0, 0.0); };
  s.system.df1 = [](const Vector&) { return Matrix(Matrix::Zero(3, 3)); };
  s.system.df2 = s.system.df1;
  const auto rep = bracket_displacement_check(s.system, make_circle_drop(1.0, 0.0),
                                              vec3(0.1, 0.2, 0.3), 0.1, 1, -1, 5);
  for (const double r : rep.residual_norms) CHECK(r < 1e-10);
}

TEST_CASE("descent at the origin of the flat scenario") {
  const Scenario s = make_scenario("brockett_flat");
  const DropCurve drop = make_circle_drop(1.0, 0.0);
  const double tau = 0.05;
  const DescentReport rep = descent_check(s.system, s.constraint, drop,
                                          Vector::Zero(3), -1.0 / tau, tau);
  CHECK(rep.descent);
  CHECK(rep.c_measured > 0.0);
  // The measured rate dominates the guaranteed alpha(x) line and stays within
  // 2x of tau0 C alpha.
  CHECK(rep.c_measured >= rep.alpha_x * (1 - 1e-9));
  CHECK(rep.c_measured <= 2.0 * rep.stima8_const);
  CHECK(rep.c_measured >= 0.5 * rep.stima8_const);
}

TEST_CASE("sharpness of the power constraint at p = 1.4 and p = 1.5") {
  const DropCurve drop = make_circle_drop(2.0 * kPi, 0.5 * kPi);

  SUBCASE("p = 1.4: the constraint is violated for small t at any omega") {
    const Scenario s = make_scenario("brockett_power", {{"p", 1.4}, {"lambda", 1.0}});
    for (const double omega : {-10.0, -100.0, -1000.0}) {
      // Violation window from the series expansion: t < (6 lambda/|omega|)^5.
      const double window = std::pow(6.0 / std::abs(omega), 5.0);
      const double tau = 0.5 * window;
      StepPolicy pol;
      pol.base_step = tau / 500.0;
      pol.min_steps_per_period = 1;
      const DescentReport rep =
          descent_check(s.system, s.constraint, drop, Vector::Zero(3), omega, tau, pol);
      CHECK_FALSE(rep.descent);
      CHECK(rep.max_h_excess > 0.0);
      CHECK(rep.failure_t >= 0.0);
    }
  }

  SUBCASE("p = 1.5, omega = -7 < -6 lambda: feasible on (0, 1e-2]") {
    const Scenario s = make_scenario("brockett_power", {{"p", 1.5}, {"lambda", 1.0}});
    StepPolicy pol;
    pol.base_step = 1e-5;
    pol.min_steps_per_period = 1;
    const DescentReport rep =
        descent_check(s.system, s.constraint, drop, Vector::Zero(3), -7.0, 1e-2, pol);
    CHECK(rep.descent);
    CHECK(rep.max_h_excess <= 0.0);
  }
}

TEST_CASE("control splicing delays the tail exactly") {
  auto base = ControlFunction::single(
      [](double t) { return Vector2d{std::cos(t), std::sin(t)}; }, 1.0, 0.0, "base");
  const auto spliced = splice_with_insert(
      base, 0.3, 0.2, [](double) { return Vector2d{1.0, 0.0}; }, 0.0, "ins");
  spliced.check_cover(1.0);
  CHECK((spliced(0.1) - base(0.1)).norm() == 0.0);
  CHECK((spliced(0.4) - Vector2d{1.0, 0.0}).norm() == 0.0);
  for (const double t : {0.55, 0.7, 0.95}) {
    CHECK((spliced(t) - base(t - 0.2)).norm() == 0.0);
  }
}

TEST_CASE("violation extent is monotone in the horizon") {
  const Scenario s = make_scenario("brockett_flat");
  const Process p =
      integrate(s.system, circle_control(6.0, 1.0), Vector::Zero(3), 1.0);
  double prev = 0.0;
  for (const double T : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    Process clipped = p;
    int n = 0;
    while (n < p.size() && p.t[n] <= T) ++n;
    clipped.t.assign(p.t.begin(), p.t.begin() + n);
    clipped.x = p.x.leftCols(n);
    const double d = violation(clipped, s.constraint).d;
    CHECK(d >= prev - 1e-15);
    prev = d;
  }
}
