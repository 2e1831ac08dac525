#pragma once

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotnft {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or out-of-domain request (e.g. zero angular velocity).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Inconsistent or unusable configuration (missing provider, bad step policy).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// A numeric procedure failed to reach its tolerance; carries a refinement trace.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::string trace)
      : Error(what + "\n" + trace), trace_(std::move(trace)) {}
  const std::string& trace() const { return trace_; }

 private:
  std::string trace_;
};

// A user-supplied callable failed; carries the evaluation point.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, Vector point)
      : Error(what), point_(std::move(point)) {}
  const Vector& point() const { return point_; }

 private:
  Vector point_;
};

// Axis-aligned box in R^n.
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vector& x, double slack = 0.0) const {
    for (int i = 0; i < dim(); ++i) {
      if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    }
    return true;
  }

  // Largest half-width; used to scale tolerances.
  double scale() const { return 0.5 * (hi - lo).lpNorm<Eigen::Infinity>(); }

  Vector center() const { return 0.5 * (lo + hi); }

  static Box cube(int n, double half_width) {
    Box b;
    b.lo = Vector::Constant(n, -half_width);
    b.hi = Vector::Constant(n, half_width);
    return b;
  }
};

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Wrap a direction (angle mod pi) into [-pi/2, pi/2).
inline double wrap_direction(double a) {
  a = std::fmod(a, kPi);
  if (a < -0.5 * kPi) a += kPi;
  if (a >= 0.5 * kPi) a -= kPi;
  return a;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double h = (b - a) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a + h * i;
  out.back() = b;
  return out;
}

inline std::vector<double> logspace(double a, double b, int n) {
  auto e = linspace(std::log10(a), std::log10(b), n);
  for (auto& v : e) v = std::pow(10.0, v);
  return e;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace rotnft
