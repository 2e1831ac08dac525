#include "rotnft/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace rotnft {

RotationalControl make_rotational(const DropCurve& base, double omega) {
  if (omega == 0.0) throw DomainError("make_rotational: omega must be nonzero");
  return RotationalControl{base, omega};
}

namespace {

// R^{lm}(T) = int_0^T r^l(s) R^m(s) ds for the primitive drop, smooth between
// generator kinks. Composite Simpson split at the kinks.
Matrix2d second_integrals_base(const DropCurve& drop, double t_from, double t_to,
                               int panels) {
  Matrix2d out = Matrix2d::Zero();
  if (t_to == t_from) return out;
  const double sgn = t_to >= t_from ? 1.0 : -1.0;
  const double a = std::min(t_from, t_to), b = std::max(t_from, t_to);

  std::vector<double> nodes{a, b};
  for (double c : drop.curve.breaks_in(a, b)) nodes.push_back(c);
  std::sort(nodes.begin(), nodes.end());

  for (size_t p = 0; p + 1 < nodes.size(); ++p) {
    const double lo = nodes[p], hi = nodes[p + 1];
    const int n = std::max(2, static_cast<int>(panels * (hi - lo) / (b - a)) & ~1);
    const double h = (hi - lo) / n;
    Matrix2d acc = Matrix2d::Zero();
    auto term = [&drop](double s) {
      const Vector2d r = drop.r(s);
      const Vector2d R = drop.R(s);
      Matrix2d m;
      for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j) m(l, j) = r[l] * R[j];
      return m;
    };
    // Piece endpoints may sit on generator kinks; evaluate one-sided.
    const double nudge = 1e-9 * h;
    acc += term(lo + nudge) + term(hi - nudge);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * term(lo + i * h);
    out += acc * (h / 3.0);
  }
  return sgn * out;
}

}  // namespace

IteratedIntegrals iterated_integrals(const RotationalControl& u,
                                     const std::vector<double>& t_grid,
                                     const QuadratureConfig& cfg) {
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (t_grid[i] < t_grid[i - 1])
      throw DomainError("iterated_integrals: t_grid must be sorted");
  }
  const DropCurve& drop = u.base;
  const double tau0 = drop.period;
  const double om = u.omega;
  const int panels = std::max(cfg.panels, 1024);

  // One period of the base second integrals, reused for every whole period.
  const Matrix2d per = second_integrals_base(drop, 0.0, tau0, panels);

  IteratedIntegrals out;
  out.t = t_grid;
  out.U.reserve(t_grid.size());
  out.Ulm.reserve(t_grid.size());
  for (double t : t_grid) {
    const double T = om * t;  // base-curve time, possibly negative
    const double k = std::floor(T / tau0);
    const double rem = T - k * tau0;
    const Matrix2d base = k * per + second_integrals_base(drop, 0.0, rem, panels);
    const Matrix2d ulm = base / (om * om);

    out.U.push_back(drop.R(T) / om);
    out.Ulm.push_back(ulm);
    Matrix2d us;
    us(0, 0) = ulm(0, 0);
    us(1, 1) = ulm(1, 1);
    us(0, 1) = us(1, 0) = 0.5 * (ulm(0, 1) + ulm(1, 0));
    out.Us.push_back(us);
    out.Ua21.push_back(0.5 * (ulm(1, 0) - ulm(0, 1)));
  }
  return out;
}

}  // namespace rotnft
