#include "rotnft/geometry.hpp"

#include "rotnft/scenarios.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace rotnft;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

// Finite-difference bracket oracle, independent of the analytic Jacobians.
Vector fd_bracket(const ControlAffineSystem& sys, const Vector& x) {
  const Matrix j1 = fd_jacobian(sys.f1, x, 1e-5);
  const Matrix j2 = fd_jacobian(sys.f2, x, 1e-5);
  return j2 * sys.f1(x) - j1 * sys.f2(x);
}

}  // namespace

TEST_CASE("Brockett bracket is (0,0,2) with analytic derivatives") {
  const Scenario s = make_scenario("brockett_flat");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = vec3(uni(rng), uni(rng), uni(rng));
    const Vector b = lie_bracket(s.system, x);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 2.0);
  }
}

TEST_CASE("bracket of a field with itself vanishes") {
  const Scenario s = make_scenario("brockett_nonlinear");
  ControlAffineSystem sys = s.system;
  sys.f2 = sys.f1;
  sys.df2 = sys.df1;
  const Vector x = vec3(0.3, -0.2, 0.5);
  CHECK(lie_bracket(sys, x).norm() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("nonlinear fields match the finite-difference bracket oracle") {
  const Scenario s = make_scenario("brockett_nonlinear");
  const Vector x = vec3(1.0, 1.0, 1.0);
  const Vector analytic = lie_bracket(s.system, x);
  const Vector fd = fd_bracket(s.system, x);
  CHECK((analytic - fd).lpNorm<Eigen::Infinity>() < 1e-6);
  // Anti-symmetry under swapping the fields.
  ControlAffineSystem swapped = s.system;
  std::swap(swapped.f1, swapped.f2);
  std::swap(swapped.df1, swapped.df2);
  CHECK((lie_bracket(swapped, x) + analytic).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("flat-constraint Lambda matrices: S vanishes, A21 is half the bracket") {
  const Scenario s = make_scenario("brockett_flat");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Vector x = vec3(uni(rng), uni(rng), uni(rng));
    const LambdaMatrices lm = lambda_matrices(s.system, s.constraint, x);
    CHECK(std::abs(lm.sym.q11) < 1e-12);
    CHECK(std::abs(lm.sym.q12) < 1e-12);
    CHECK(std::abs(lm.sym.q22) < 1e-12);
    const double half_bracket =
        0.5 * s.constraint.grad(x).dot(lie_bracket(s.system, x));
    CHECK(lm.a21 == doctest::Approx(half_bracket).epsilon(1e-10));
    CHECK(lm.sym.q12 ==
          doctest::Approx(0.5 * (lm.lambda(0, 1) + lm.lambda(1, 0))).epsilon(1e-14));
  }
}

TEST_CASE("zero fields give a zero Lambda matrix") {
  Scenario s = make_scenario("brockett_flat");
  s.system.f1 = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  s.system.f2 = s.system.f1;
  s.system.df1 = [](const Vector& x) {
    return Matrix(Matrix::Zero(x.size(), x.size()));
  };
  s.system.df2 = s.system.df1;
  const LambdaMatrices lm = lambda_matrices(s.system, s.constraint, vec3(0.1, 0.2, 0.3));
  CHECK(lm.lambda.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generalized integrator: det S = -((g1-g2)/2)^2 on the singular set") {
  for (const auto [g1, g2] : {std::pair{1.0, 2.0}, {0.5, 3.0}, {2.0, 2.0}}) {
    const Scenario s =
        make_scenario("brockett_general", {{"gamma1", g1}, {"gamma2", g2}});
    const Vector x = vec3(0.0, 0.0, -0.4);
    const LambdaMatrices lm = lambda_matrices(s.system, s.constraint, x);
    CHECK(lm.sym.det() == doctest::Approx(-0.25 * (g1 - g2) * (g1 - g2)).epsilon(1e-10));
    if (g1 != g2) CHECK(classify(lm.sym).cls == FormClass::kIndefinite);
  }
}

TEST_CASE("invariance audit: identity and linear and quadratic charts") {
  const Scenario s = make_scenario("brockett_flat");
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-0.8, 0.8);
  std::vector<Vector> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(vec3(uni(rng), uni(rng), uni(rng)));

  Diffeomorphism ident;
  ident.name = "identity";
  ident.forward = [](const Vector& x) { return x; };
  ident.inverse = [](const Vector& x) { return x; };
  ident.jacobian = [](const Vector& x) {
    return Matrix(Matrix::Identity(x.size(), x.size()));
  };
  CHECK(invariance_audit(s.system, s.constraint, ident, pts).max_discrepancy < 1e-9);

  Diffeomorphism doubling;
  doubling.name = "x2";
  doubling.forward = [](const Vector& x) { return Vector(2.0 * x); };
  doubling.inverse = [](const Vector& x) { return Vector(0.5 * x); };
  doubling.jacobian = [](const Vector& x) {
    return Matrix(2.0 * Matrix::Identity(x.size(), x.size()));
  };
  CHECK(invariance_audit(s.system, s.constraint, doubling, pts).max_discrepancy <
        1e-10);

  Diffeomorphism shear;
  shear.name = "xy-shear";
  shear.forward = [](const Vector& x) {
    Vector y = x;
    y[2] += x[0] * x[1];
    return y;
  };
  shear.inverse = [](const Vector& y) {
    Vector x = y;
    x[2] -= y[0] * y[1];
    return x;
  };
  shear.jacobian = [](const Vector& x) {
    Matrix j = Matrix::Identity(3, 3);
    j(2, 0) = x[1];
    j(2, 1) = x[0];
    return j;
  };
  CHECK(invariance_audit(s.system, s.constraint, shear, pts).max_discrepancy < 1e-6);
}

TEST_CASE("invariance discrepancy stays at noise level for shrinking charts") {
  const Scenario s = make_scenario("brockett_flat");
  std::vector<Vector> pts{vec3(0.2, -0.3, 0.1), vec3(-0.5, 0.4, -0.2)};
  for (const double eps : {0.5, 0.25, 0.125}) {
    Diffeomorphism d;
    d.forward = [eps](const Vector& x) {
      Vector y = x;
      y[2] += eps * x[0] * x[1];
      return y;
    };
    d.inverse = [eps](const Vector& y) {
      Vector x = y;
      x[2] -= eps * y[0] * y[1];
      return x;
    };
    d.jacobian = [eps](const Vector& x) {
      Matrix j = Matrix::Identity(3, 3);
      j(2, 0) = eps * x[1];
      j(2, 1) = eps * x[0];
      return j;
    };
    CHECK(invariance_audit(s.system, s.constraint, d, pts).max_discrepancy < 1e-6);
  }
}

TEST_CASE("singular diffeo samples are skipped and flagged") {
  const Scenario s = make_scenario("brockett_flat");
  Diffeomorphism bad;
  bad.forward = [](const Vector& x) { return x; };
  bad.inverse = [](const Vector& x) { return x; };
  bad.jacobian = [](const Vector& x) {
    Matrix j = Matrix::Identity(3, 3);
    j(0, 0) = x[0];  // singular at x1 = 0
    return j;
  };
  const auto rep =
      invariance_audit(s.system, s.constraint, bad, {vec3(0.0, 0.1, 0.1)});
  CHECK(rep.n_skipped == 1);
}

TEST_CASE("audit: brockett_flat passes everything with alpha ~ 2, d0 ~ 1") {
  const Scenario s = make_scenario("brockett_flat");
  AuditConfig cfg;
  cfg.grid_per_axis = 7;
  cfg.n_mc = 400;
  const AssumptionAudit a = audit_assumptions(s.system, s.constraint, s.singular, cfg);
  CHECK(a.singular_detected);
  CHECK_FALSE(a.ipc_pass);
  CHECK(a.h1_pass);
  CHECK(a.h3_pass);
  CHECK(a.h4_pass);
  CHECK(a.alpha_hat == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(a.h5_pass);
  CHECK(a.h6_pass);
  CHECK(a.d0_hat == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("audit: h6_violator keeps H4 but loses H6") {
  const Scenario s = make_scenario("h6_violator");
  AuditConfig cfg;
  cfg.grid_per_axis = 7;
  cfg.n_mc = 400;
  const AssumptionAudit a = audit_assumptions(s.system, s.constraint, s.singular, cfg);
  CHECK(a.h4_pass);
  CHECK(a.alpha_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(a.h6_pass);
  CHECK(a.d0_hat < 1e-2);
}

TEST_CASE("audit: no singular set in the box reports the first-order regime") {
  Scenario s = make_scenario("brockett_flat");
  // Push f1 off-tangent everywhere: grad h . f1 <= -1 on the whole box.
  s.system.f1 = [](const Vector& x) {
    Vector v(3);
    v << 1.0, 0.0, -x[1] - 2.0;
    return v;
  };
  s.singular = SingularSetModel::empty();
  AuditConfig cfg;
  cfg.grid_per_axis = 5;
  cfg.n_mc = 200;
  const AssumptionAudit a = audit_assumptions(s.system, s.constraint, s.singular, cfg);
  CHECK_FALSE(a.singular_detected);
  CHECK(a.regime == "first-order-ipc");
  CHECK(a.ipc_pass);
}

TEST_CASE("H4 flips exactly at gamma1 = -gamma2") {
  for (const double g2 : {0.5, 1.0, 2.0}) {
    const Scenario bad =
        make_scenario("brockett_general", {{"gamma1", -g2}, {"gamma2", g2}});
    AuditConfig cfg;
    cfg.grid_per_axis = 5;
    cfg.n_mc = 100;
    const AssumptionAudit a =
        audit_assumptions(bad.system, bad.constraint, bad.singular, cfg);
    CHECK_FALSE(a.h4_pass);

    const Scenario good =
        make_scenario("brockett_general", {{"gamma1", -g2 + 0.2}, {"gamma2", g2}});
    const AssumptionAudit b =
        audit_assumptions(good.system, good.constraint, good.singular, cfg);
    CHECK(b.h4_pass);
  }
}

TEST_CASE("audit: power constraint C^{2,1} check flips between p=1.4 and p=1.5") {
  AuditConfig cfg;
  cfg.grid_per_axis = 5;
  cfg.n_mc = 100;
  const Scenario sharp = make_scenario("brockett_power", {{"p", 1.4}});
  const AssumptionAudit a =
      audit_assumptions(sharp.system, sharp.constraint, sharp.singular, cfg);
  CHECK_FALSE(a.h3_pass);

  const Scenario ok = make_scenario("brockett_power", {{"p", 1.5}});
  const AssumptionAudit b = audit_assumptions(ok.system, ok.constraint, ok.singular, cfg);
  CHECK(b.h3_pass);
  CHECK(b.h4_pass);
  CHECK(b.h5_pass);
  CHECK(b.h6_pass);
}

TEST_CASE("counterexample audit: H4 fails, feasible-collar H6 holds") {
  const Scenario s = make_scenario("counterexample");
  AuditConfig cfg;
  cfg.grid_per_axis = 9;
  cfg.n_mc = 400;
  const AssumptionAudit a = audit_assumptions(s.system, s.constraint, s.singular, cfg);
  CHECK(a.singular_detected);
  CHECK_FALSE(a.h4_pass);
  CHECK_FALSE(a.ipc_pass);
  CHECK(a.h5_pass);
  CHECK(a.h6_pass);
}
