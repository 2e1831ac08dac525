#include "rotnft/quadform.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace rotnft;

namespace {

// Independent oracle: dense angular scan of Q(cos t, sin t) for the negative
// sector; recovers (phi, beta) without the eigendecomposition.
struct ScanResult {
  double phi;
  double beta;
  bool has_negative;
};

ScanResult angular_scan(const SymForm2& q, int n = 400000) {
  // Work on [0, pi); the form is even.
  double best = 0.0;
  double arg = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = kPi * i / n;
    const double v = q(std::cos(th), std::sin(th));
    if (v < best) {
      best = v;
      arg = th;
    }
  }
  ScanResult r{wrap_direction(arg), 0.0, best < 0.0};
  if (!r.has_negative) return r;
  // Walk outward from the minimizer until the sign changes.
  double lo = arg, hi = arg;
  while (q(std::cos(lo), std::sin(lo)) < 0.0) lo -= kPi / n;
  while (q(std::cos(hi), std::sin(hi)) < 0.0) hi += kPi / n;
  r.beta = 0.5 * (hi - lo);
  r.phi = wrap_direction(0.5 * (hi + lo));
  return r;
}

}  // namespace

TEST_CASE("classification basics") {
  CHECK(classify({0, 0, 0}).cls == FormClass::kNegativeSemidefinite);
  CHECK(classify({-1, 0, 1}).cls == FormClass::kIndefinite);
  CHECK(classify({-2, 0, -1}).cls == FormClass::kNegativeDefinite);
  CHECK(classify({1, 0, 2}).cls == FormClass::kNotNonPositive);
  CHECK(classify({0, 0, 1}).cls == FormClass::kNotNonPositive);
  CHECK(classify({-1, 0, 0}).cls == FormClass::kNegativeSemidefinite);
}

TEST_CASE("generalized integrator S form on the singular set is indefinite") {
  // S = [[0, s], [s, 0]] with s = (g1 - g2)/2; det = -s^2.
  for (const double g1 : {1.0, 2.0, -0.5}) {
    for (const double g2 : {3.0, 0.25}) {
      const double s = 0.5 * (g1 - g2);
      const SymForm2 q{0.0, s, 0.0};
      CHECK(q.det() == doctest::Approx(-0.25 * (g1 - g2) * (g1 - g2)));
      if (g1 != g2) CHECK(classify(q).cls == FormClass::kIndefinite);
    }
  }
}

TEST_CASE("evaluation matches the bilinear expansion") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const SymForm2 q{uni(rng), uni(rng), uni(rng)};
    const double u1 = uni(rng), u2 = uni(rng);
    const double direct = q.q11 * u1 * u1 + 2 * q.q12 * u1 * u2 + q.q22 * u2 * u2;
    CHECK(q(u1, u2) == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("geometry of diag(-1, 1)") {
  const FormGeometry g = form_geometry({-1, 0, 1});
  CHECK(g.phi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g.beta == doctest::Approx(kPi / 4).epsilon(1e-12));
  const ScanResult s = angular_scan({-1, 0, 1});
  CHECK(g.phi == doctest::Approx(s.phi).epsilon(1e-4));
  CHECK(g.beta == doctest::Approx(s.beta).epsilon(1e-4));
}

TEST_CASE("negative definite forms get the full half-amplitude") {
  const FormGeometry g = form_geometry({-2, 0, -1});
  CHECK(g.phi == doctest::Approx(0.0));
  CHECK(g.beta == doctest::Approx(kPi / 2));
}

TEST_CASE("rotating diag(-1,1) by pi/6 rotates the principal direction") {
  const SymForm2 q = SymForm2{-1, 0, 1}.rotated(kPi / 6);
  const FormGeometry g = form_geometry(q);
  CHECK(g.phi == doctest::Approx(kPi / 6).epsilon(1e-10));
  CHECK(g.beta == doctest::Approx(kPi / 4).epsilon(1e-10));
  const ScanResult s = angular_scan(q);
  CHECK(std::abs(wrap_direction(g.phi - s.phi)) < 1e-4);
  CHECK(g.beta == doctest::Approx(s.beta).epsilon(1e-4));
}

TEST_CASE("geometry vs angular scan on random non-positive forms") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  int checked = 0;
  while (checked < 60) {
    const SymForm2 q{uni(rng), uni(rng), uni(rng)};
    const auto c = classify(q);
    if (c.cls != FormClass::kIndefinite) continue;
    ++checked;
    const FormGeometry g = form_geometry(q);
    const ScanResult s = angular_scan(q);
    CHECK(std::abs(wrap_direction(g.phi - s.phi)) < 2e-4);
    CHECK(g.beta == doctest::Approx(s.beta).epsilon(5e-4));
  }
}

TEST_CASE("rotation equivariance and positive scaling invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  int done = 0;
  while (done < 300) {
    const SymForm2 q{uni(rng), uni(rng), uni(rng)};
    if (classify(q).cls == FormClass::kNotNonPositive) continue;
    if (q.max_abs() < 1e-3) continue;
    bool vanishing = std::abs(q.q11) < 1e-12 && std::abs(q.q12) < 1e-12 &&
                     std::abs(q.q22) < 1e-12;
    if (vanishing) continue;
    ++done;
    const FormGeometry g = form_geometry(q);

    const double th = ang(rng);
    const SymForm2 qr = q.rotated(th);
    const FormGeometry gr = form_geometry(qr);
    CHECK(std::abs(wrap_direction(gr.phi - (g.phi + th))) < 1e-10);
    CHECK(gr.beta == doctest::Approx(g.beta).epsilon(1e-10));

    const double c = std::abs(uni(rng)) + 0.1;
    CHECK(classify(q.scaled(c)).cls == classify(q).cls);
    const FormGeometry gs = form_geometry(q.scaled(c));
    CHECK(gs.phi == doctest::Approx(g.phi).epsilon(1e-12));
    CHECK(gs.beta == doctest::Approx(g.beta).epsilon(1e-12));
  }
}

TEST_CASE("sector characterization over random directions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const SymForm2 q{-1.0, 0.4, 0.7};
  REQUIRE(classify(q).cls == FormClass::kIndefinite);
  const FormGeometry g = form_geometry(q);
  int tested = 0;
  for (int i = 0; i < 20000 && tested < 10000; ++i) {
    const double u1 = uni(rng), u2 = uni(rng);
    if (u1 * u1 + u2 * u2 < 1e-6) continue;
    const double arg = std::atan2(u2, u1);
    const double off = std::abs(wrap_direction(arg - g.phi));
    if (std::abs(off - g.beta) < 1e-3) continue;  // tol band at the boundary
    ++tested;
    const bool negative = q(u1, u2) < 0.0;
    const bool inside = off < g.beta;
    CHECK(negative == inside);
  }
  CHECK(tested >= 10000);
}

TEST_CASE("errors: vanishing and not-non-positive forms") {
  CHECK_THROWS_AS(form_geometry({0, 0, 0}), DomainError);
  CHECK_THROWS_AS(form_geometry({1, 0, 1}), DomainError);
}
