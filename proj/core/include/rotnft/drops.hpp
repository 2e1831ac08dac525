#pragma once

#include "rotnft/quadform.hpp"
#include "rotnft/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rotnft {

// A plane curve with explicit velocity. `breaks` lists the kink locations of
// the velocity (within [0, period) for periodic curves, absolute otherwise);
// quadratures split there.
struct PlanarCurve {
  std::function<Vector2d(double)> position;
  std::function<Vector2d(double)> velocity;
  double period = 0.0;  // 0 => not periodic
  std::vector<double> breaks;

  std::vector<double> breaks_in(double a, double b) const;
};

struct QuadratureConfig {
  int panels = 512;        // initial composite-Simpson panels per call
  int max_refinements = 6; // panel doublings before giving up
  double tol = 1e-10;      // absolute Richardson tolerance target
};

// Signed swept area 1/2 int (R2' R1 - R1' R2) over [t1, t2].
double area(const PlanarCurve& curve, double t1, double t2,
            const QuadratureConfig& cfg = {});

// Excess functional: sum over l,m of the nested integrals of |xi R_l'(xi)|
// against |R_m'(s)|; inner integrals always start at 0.
double excess(const PlanarCurve& curve, double t1, double t2,
              const QuadratureConfig& cfg = {});

// Cumulative Area(0..t) and Exc(0..t) sampled on a shared grid over [0, t_max].
struct CumulativeSweep {
  std::vector<double> t;
  std::vector<double> area;
  std::vector<double> excess;
};
CumulativeSweep cumulative_area_excess(const PlanarCurve& curve, double t_max,
                                       int samples);

enum class DropKind { kCircleLike, kPointed, kCustom };

// A periodic arc-length drop curve R with generator r = dR/dt.
struct DropCurve {
  PlanarCurve curve;
  double period = 0.0;          // tau0
  double phase = 0.0;           // varphi
  double half_amplitude = 0.0;  // beta
  double lip = 0.0;             // Lipschitz constant of r (piecewise for pointed)
  DropKind kind = DropKind::kCustom;
  // Closed-form A(t) = Area(R)|_0^t for any real t; null => quadrature.
  std::function<double(double)> area_closed;

  Vector2d r(double t) const { return curve.velocity(t); }
  Vector2d R(double t) const { return curve.position(t); }
  double area_to(double t, const QuadratureConfig& cfg = {}) const;
};

// Circle of radius tau0/(2 pi) traversed once per period, rotated by phase.
DropCurve make_circle_drop(double tau0, double phase);

// The two-arc pointed drop built from a circular arc and its reflected,
// time-reversed copy, with P = pi tau0 / (2 beta) so the period is tau0.
DropCurve make_pointed_drop(double tau0, double phase, double beta);

struct ValidateConfig {
  int samples = 1024;            // per period; >= 1000 expected by callers
  double tol = 1e-9;
  double sigma_floor_rel = 1e-4; // certify Exc <= C_R Area on sigma >= this * tau0
  double cr_cap = 1e3;           // certificate fails if C_R exceeds this
  double t_bar = 0.0;            // interval for the cubic bound; 0 => tau0
};

struct DropCertificate {
  bool pass = false;
  std::vector<std::string> violated;  // names of failed Definition clauses
  double c_r = 0.0;                   // max Exc/Area over certified sigmas
  bool area_monotone = false;
  double cubic_constant = 0.0;        // largest C with Area >= C t^3 on [0, t_bar]
  double t_bar = 0.0;
  double limit_ratio_near_zero = 0.0; // Exc/Area at the smallest sampled sigma
  int samples_used = 0;
};

DropCertificate validate_drop(const DropCurve& drop, const ValidateConfig& cfg = {});

// Is the (phase, half-amplitude) pair adapted to the non-positive form S,
// i.e. phase = +-phi_S (mod pi per the antipodal symmetry) and beta <= beta_S?
bool adapted_to(const DropCurve& drop, const SymForm2& s, double tol = 1e-9);

}  // namespace rotnft
