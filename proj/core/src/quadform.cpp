#include "rotnft/quadform.hpp"

#include <cmath>

namespace rotnft {

SymForm2 SymForm2::rotated(double theta) const {
  // R Q R^T for R the rotation by theta, so the principal direction of the
  // result is the original one rotated by +theta.
  const double c = std::cos(theta), s = std::sin(theta);
  const double a = q11, b = q12, d = q22;
  SymForm2 out;
  out.q11 = a * c * c - 2.0 * b * c * s + d * s * s;
  out.q12 = (a - d) * c * s + b * (c * c - s * s);
  out.q22 = a * s * s + 2.0 * b * c * s + d * c * c;
  return out;
}

const char* to_string(FormClass c) {
  switch (c) {
    case FormClass::kIndefinite: return "indefinite";
    case FormClass::kNegativeSemidefinite: return "negative_semidefinite";
    case FormClass::kNegativeDefinite: return "negative_definite";
    case FormClass::kNotNonPositive: return "not_non_positive";
  }
  return "?";
}

Classification classify(const SymForm2& q, double tol_rel) {
  const double tol = tol_rel * q.max_abs() * q.max_abs();
  const double ptol = tol_rel * q.max_abs();
  const double delta = q.det();

  Classification r;
  r.degenerate = std::abs(delta) <= tol || (delta > tol && std::abs(q.q11) <= ptol);

  if (delta < -tol) {
    r.cls = FormClass::kIndefinite;
  } else if (delta > tol) {
    r.cls = q.q11 < -ptol ? FormClass::kNegativeDefinite : FormClass::kNotNonPositive;
  } else {
    // Singular matrix: sign is decided by the diagonal.
    r.cls = (q.q11 <= ptol && q.q22 <= ptol) ? FormClass::kNegativeSemidefinite
                                             : FormClass::kNotNonPositive;
  }
  return r;
}

FormGeometry form_geometry(const SymForm2& q, double tol_rel) {
  const Classification c = classify(q, tol_rel);
  if (c.cls == FormClass::kNotNonPositive) {
    throw DomainError("form_geometry: form is not non-positive");
  }
  const double ptol = tol_rel * q.max_abs();
  if (std::abs(q.q11) <= ptol && std::abs(q.q12) <= ptol && std::abs(q.q22) <= ptol) {
    throw DomainError("form_geometry: geometry undefined for vanishing form");
  }

  // Closed-form 2x2 symmetric eigendecomposition.
  const double tr = q.q11 + q.q22;
  const double disc = std::sqrt(std::max(
      0.0, (q.q11 - q.q22) * (q.q11 - q.q22) + 4.0 * q.q12 * q.q12));
  const double lmin = 0.5 * (tr - disc);
  const double lmax = 0.5 * (tr + disc);

  // Eigenvector of lmin; pick the better conditioned of the two expressions.
  double vx, vy;
  if (std::abs(q.q11 - lmin) >= std::abs(q.q22 - lmin)) {
    vx = -q.q12;
    vy = q.q11 - lmin;
  } else {
    vx = q.q22 - lmin;
    vy = -q.q12;
  }
  double phi;
  if (std::abs(vx) <= ptol && std::abs(vy) <= ptol) {
    // q12 ~ 0 and a degenerate diagonal; the smaller diagonal entry decides.
    phi = q.q11 <= q.q22 ? 0.0 : 0.5 * kPi;
  } else {
    phi = std::atan2(vy, vx);
  }
  phi = wrap_direction(phi);

  FormGeometry g;
  g.cls = c.cls;
  g.phi = phi;
  if (c.cls == FormClass::kIndefinite) {
    // In the eigenbasis Q(cos a, sin a) = lmin cos^2 a + lmax sin^2 a, so the
    // zero directions sit at +-atan(sqrt(-lmin/lmax)) around phi.
    g.beta = std::atan(std::sqrt(-lmin / lmax));
  } else {
    g.beta = 0.5 * kPi;
  }
  return g;
}

}  // namespace rotnft
