#pragma once

#include "rotnft/types.hpp"

namespace rotnft {

// A quadratic form on R^2, stored as the entries of its symmetric matrix.
struct SymForm2 {
  double q11 = 0.0;
  double q12 = 0.0;
  double q22 = 0.0;

  double operator()(double u1, double u2) const {
    return q11 * u1 * u1 + 2.0 * q12 * u1 * u2 + q22 * u2 * u2;
  }
  double operator()(const Vector2d& u) const { return (*this)(u[0], u[1]); }

  double det() const { return q11 * q22 - q12 * q12; }
  double max_abs() const {
    return std::max({std::abs(q11), std::abs(q12), std::abs(q22), 1.0});
  }

  SymForm2 scaled(double c) const { return {c * q11, c * q12, c * q22}; }

  // Congruence transform R^T Q R for the rotation by theta.
  SymForm2 rotated(double theta) const;
};

enum class FormClass {
  kIndefinite,
  kNegativeSemidefinite,
  kNegativeDefinite,
  kNotNonPositive,
};

const char* to_string(FormClass c);

struct Classification {
  FormClass cls;
  // Set when det or a pivot lies within tolerance of a class boundary.
  bool degenerate = false;
};

// Sign classification of the form. Total; never throws.
Classification classify(const SymForm2& q, double tol_rel = 1e-12);

inline bool non_positive(FormClass c) { return c != FormClass::kNotNonPositive; }

// Principal direction and half-amplitude of a non-positive form.
//
// phi is the direction (in [-pi/2, pi/2)) of the eigenvector belonging to the
// smaller eigenvalue; beta in (0, pi/2] is the angular half-width of the open
// sector around phi on which the form is strictly negative. For negative
// definite or semidefinite forms beta = pi/2.
struct FormGeometry {
  double phi = 0.0;
  double beta = 0.0;
  FormClass cls = FormClass::kNegativeSemidefinite;
};

// Throws DomainError for a vanishing form or when the form is not non-positive.
FormGeometry form_geometry(const SymForm2& q, double tol_rel = 1e-12);

}  // namespace rotnft
