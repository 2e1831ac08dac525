#include "rotnft/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rotnft {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

long GridSpec::node_count() const {
  long n = 1;
  for (int a = 0; a < dim(); ++a) n *= nodes(a);
  return n;
}

Vector GridSpec::point(long flat) const {
  Vector x(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    const int n = nodes(a);
    const long i = flat % n;
    flat /= n;
    x[a] = box.lo[a] + spacing(a) * static_cast<double>(i);
  }
  return x;
}

long GridSpec::flatten(const std::vector<int>& idx) const {
  long flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * nodes(a) + idx[static_cast<size_t>(a)];
  return flat;
}

GridSpec GridSpec::uniform(const Box& box, int cells_per_axis) {
  GridSpec g;
  g.box = box;
  g.cells.assign(static_cast<size_t>(box.dim()), cells_per_axis);
  return g;
}

ControlMesh ControlMesh::disc(int dirs, int radii) {
  ControlMesh m;
  m.points.emplace_back(0.0, 0.0);
  for (int r = 1; r <= radii; ++r) {
    const double rho = static_cast<double>(r) / radii;
    for (int k = 0; k < dirs; ++k) {
      const double th = 2.0 * kPi * k / dirs;
      m.points.emplace_back(rho * std::cos(th), rho * std::sin(th));
    }
  }
  return m;
}

namespace {

// Locates the interpolation stencil of x among cells whose corners all pass
// `ok`; on grid faces the neighboring cell is tried as a fallback. Returns
// false when no such cell exists.
struct Stencil {
  long base = 0;          // flat index of the low corner
  double frac[3] = {0, 0, 0};
};

template <typename OkFn>
bool locate(const GridSpec& grid, const Vector& x, const OkFn& ok, Stencil* out) {
  const int d = grid.dim();
  int cell[3];
  double frac[3];
  bool on_face[3] = {false, false, false};
  for (int a = 0; a < d; ++a) {
    const double u = (x[a] - grid.box.lo[a]) / grid.spacing(a);
    if (u < -1e-9 || u > grid.cells[static_cast<size_t>(a)] + 1e-9) return false;
    int c = static_cast<int>(std::floor(u));
    c = std::clamp(c, 0, grid.cells[static_cast<size_t>(a)] - 1);
    double f = u - c;
    f = std::clamp(f, 0.0, 1.0);
    cell[a] = c;
    frac[a] = f;
    on_face[a] = f < 1e-9 && c > 0;
  }

  // Candidate cells: the natural one first, then face fallbacks (low side).
  const int combos = 1 << d;
  for (int mask = 0; mask < combos; ++mask) {
    bool valid = true;
    int ccell[3];
    double cfrac[3];
    for (int a = 0; a < d; ++a) {
      if (mask & (1 << a)) {
        if (!on_face[a]) {
          valid = false;
          break;
        }
        ccell[a] = cell[a] - 1;
        cfrac[a] = 1.0;
      } else {
        ccell[a] = cell[a];
        cfrac[a] = frac[a];
      }
    }
    if (!valid) continue;
    bool corners_ok = true;
    for (int corner = 0; corner < combos && corners_ok; ++corner) {
      std::vector<int> idx(static_cast<size_t>(d));
      for (int a = 0; a < d; ++a) idx[static_cast<size_t>(a)] = ccell[a] + ((corner >> a) & 1);
      if (!ok(grid.flatten(idx))) corners_ok = false;
    }
    if (!corners_ok) continue;
    std::vector<int> low(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) low[static_cast<size_t>(a)] = ccell[a];
    out->base = grid.flatten(low);
    for (int a = 0; a < d; ++a) out->frac[a] = cfrac[a];
    return true;
  }
  return false;
}

double interp(const GridSpec& grid, const std::vector<double>& v, const Stencil& st) {
  const int d = grid.dim();
  long strides[3];
  long s = 1;
  for (int a = d - 1; a >= 0; --a) {
    strides[a] = s;
    s *= grid.nodes(a);
  }
  double acc = 0.0;
  const int combos = 1 << d;
  for (int corner = 0; corner < combos; ++corner) {
    double wgt = 1.0;
    long off = 0;
    for (int a = 0; a < d; ++a) {
      const bool hi = (corner >> a) & 1;
      wgt *= hi ? st.frac[a] : 1.0 - st.frac[a];
      off += hi ? strides[a] : 0;
    }
    if (wgt != 0.0) acc += wgt * v[static_cast<size_t>(st.base + off)];
  }
  return acc;
}

// One autonomous RK4 step of xdot = f1 u1 + f2 u2.
Vector rk4_once(const ControlAffineSystem& sys, const Vector& x, const Vector2d& u,
                double dt) {
  const Vector k1 = sys.rhs(x, u);
  const Vector k2 = sys.rhs(x + 0.5 * dt * k1, u);
  const Vector k3 = sys.rhs(x + 0.5 * dt * k2, u);
  const Vector k4 = sys.rhs(x + dt * k3, u);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Entry {
  std::int32_t base;
  float frac[3];
  float lval;
};

}  // namespace

double ValueField::value_at(const Vector& x) const {
  Stencil st;
  const auto ok = [this](long flat) { return viable[static_cast<size_t>(flat)] != 0; };
  if (!locate(grid, x, ok, &st)) return kNaN;
  return interp(grid, v, st);
}

ValueField value_iteration(const ControlAffineSystem& sys, const Constraint& con,
                           const Lagrangian& lag, const GridSpec& grid, double dt,
                           const ControlMesh& mesh, const ValueIterationConfig& cfg) {
  ValueField field;
  field.grid = grid;
  field.dt = dt;
  const long n = grid.node_count();
  field.viable.assign(static_cast<size_t>(n), 0);
  field.v.assign(static_cast<size_t>(n), kNaN);

  for (long i = 0; i < n; ++i) {
    if (con.h(grid.point(i)) <= 0.0) {
      field.viable[static_cast<size_t>(i)] = 1;
    } else {
      ++field.masked_nodes;
    }
  }

  // Transition table against the viable mask; nodes losing every control are
  // flagged and removed, and the table is rebuilt until stable (a mesh-scale
  // viability iteration; usually one pass).
  std::vector<long> offsets;
  std::vector<Entry> entries;
  const double discount = std::exp(-dt);
  const double lweight = 1.0 - discount;

  for (int round = 0; round < 6; ++round) {
    offsets.assign(static_cast<size_t>(n) + 1, 0);
    entries.clear();
    const auto ok = [&field](long flat) {
      return field.viable[static_cast<size_t>(flat)] != 0;
    };
    long newly_flagged = 0;
    for (long i = 0; i < n; ++i) {
      offsets[static_cast<size_t>(i)] = static_cast<long>(entries.size());
      if (!field.viable[static_cast<size_t>(i)]) continue;
      const Vector x = grid.point(i);
      for (const auto& u : mesh.points) {
        const Vector xp = rk4_once(sys, x, u, dt);
        if (con.h(xp) > 0.0) continue;
        Stencil st;
        if (!locate(grid, xp, ok, &st)) continue;
        Entry e;
        e.base = static_cast<std::int32_t>(st.base);
        for (int a = 0; a < 3; ++a) e.frac[a] = static_cast<float>(st.frac[a]);
        e.lval = static_cast<float>(lag.L(x, u));
        entries.push_back(e);
      }
      if (static_cast<long>(entries.size()) == offsets[static_cast<size_t>(i)]) {
        field.viable[static_cast<size_t>(i)] = 0;
        ++newly_flagged;
      }
    }
    offsets[static_cast<size_t>(n)] = static_cast<long>(entries.size());
    field.flagged_nodes += newly_flagged;
    if (newly_flagged == 0) break;
  }

  for (long i = 0; i < n; ++i) {
    field.v[static_cast<size_t>(i)] = field.viable[static_cast<size_t>(i)] ? 0.0 : kNaN;
  }

  // Jacobi sweeps into a fresh buffer (deterministic regardless of order).
  std::vector<double> next(field.v);
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double res = 0.0;
    for (long i = 0; i < n; ++i) {
      if (!field.viable[static_cast<size_t>(i)]) continue;
      double best = std::numeric_limits<double>::infinity();
      for (long e = offsets[static_cast<size_t>(i)]; e < offsets[static_cast<size_t>(i) + 1]; ++e) {
        const Entry& en = entries[static_cast<size_t>(e)];
        Stencil st;
        st.base = en.base;
        for (int a = 0; a < 3; ++a) st.frac[a] = en.frac[a];
        const double val = lweight * en.lval + discount * interp(grid, field.v, st);
        best = std::min(best, val);
      }
      next[static_cast<size_t>(i)] = best;
      res = std::max(res, std::abs(best - field.v[static_cast<size_t>(i)]));
    }
    field.v.swap(next);
    ++field.sweeps;
    field.residual = res;
    if (cfg.record_contraction) field.contraction_history.push_back(res);
    if (res <= cfg.tol) break;
  }
  return field;
}

double hamiltonian(const ControlAffineSystem& sys, const Lagrangian& lag,
                   const Vector& x, const Vector& p, const ControlMesh& mesh) {
  const Vector f1 = sys.f1(x);
  const Vector f2 = sys.f2(x);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& u : mesh.points) {
    const double drift = (f1 * u[0] + f2 * u[1]).dot(p);
    best = std::max(best, -drift + lag.L(x, u));
  }
  return best;
}

ModulusReport continuity_probe(const ValueField& field,
                               const std::vector<std::pair<Vector, Vector>>& pairs,
                               const std::vector<double>& r_buckets) {
  ModulusReport rep;
  rep.r = r_buckets;
  std::sort(rep.r.begin(), rep.r.end());
  rep.omega_hat.assign(rep.r.size(), 0.0);
  rep.pairs.assign(rep.r.size(), 0);
  for (const auto& [a, b] : pairs) {
    const double va = field.value_at(a);
    const double vb = field.value_at(b);
    if (std::isnan(va) || std::isnan(vb)) {
      ++rep.skipped;
      continue;
    }
    const double dist = (a - b).norm();
    const double gap = std::abs(va - vb);
    for (size_t k = 0; k < rep.r.size(); ++k) {
      if (dist <= rep.r[k]) {
        rep.omega_hat[k] = std::max(rep.omega_hat[k], gap);
        ++rep.pairs[k];
        break;
      }
    }
  }
  return rep;
}

std::vector<std::pair<Vector, Vector>> boundary_pairs(const GridSpec& grid,
                                                      const Constraint& con,
                                                      double r_max, int max_pairs,
                                                      std::uint64_t seed) {
  std::vector<std::pair<Vector, Vector>> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const long n = grid.node_count();
  const long stride = std::max<long>(1, n / (4L * max_pairs));
  const double band = 2.0 * r_max;
  for (long i = 0; i < n && static_cast<int>(out.size()) < max_pairs; i += stride) {
    const Vector x = grid.point(i);
    const double h = con.h(x);
    if (h > 0.0 || h < -band) continue;
    Vector y = x;
    for (int a = 0; a < grid.dim(); ++a) y[a] += r_max * uni(rng);
    if (con.h(y) > 0.0) continue;
    out.emplace_back(x, y);
  }
  return out;
}

ResidualReport hjb_residual(const ControlAffineSystem& sys, const Lagrangian& lag,
                            const ValueField& field, const ControlMesh& mesh,
                            const std::vector<Vector>& samples) {
  std::vector<double> res;
  const int d = field.grid.dim();
  for (const auto& x : samples) {
    const double v = field.value_at(x);
    if (std::isnan(v)) continue;
    // Multilinear gradient: central difference of the interpolant per axis at
    // half-spacing, staying inside the same cell.
    Vector p(d);
    bool okp = true;
    for (int a = 0; a < d; ++a) {
      const double h = 0.49 * field.grid.spacing(a);
      Vector xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      const double vp = field.value_at(xp);
      const double vm = field.value_at(xm);
      if (std::isnan(vp) || std::isnan(vm)) {
        okp = false;
        break;
      }
      p[a] = (vp - vm) / (2.0 * h);
    }
    if (!okp) continue;
    const double H = hamiltonian(sys, lag, x, p, mesh);
    res.push_back(std::abs(v + H - 2.0 * lag.L(x, Vector2d::Zero())));
  }
  ResidualReport rep;
  rep.n = static_cast<int>(res.size());
  if (res.empty()) return rep;
  std::sort(res.begin(), res.end());
  rep.median = res[res.size() / 2];
  rep.q90 = res[static_cast<size_t>(0.9 * (res.size() - 1))];
  rep.max = res.back();
  return rep;
}

std::vector<Vector> interior_cell_centers(const ValueField& field, int max_n) {
  std::vector<Vector> out;
  const GridSpec& g = field.grid;
  const long n = g.node_count();
  const long stride = std::max<long>(1, n / (4L * max_n));
  for (long i = 0; i < n && static_cast<int>(out.size()) < max_n; i += stride) {
    Vector x = g.point(i);
    bool interior = true;
    for (int a = 0; a < g.dim(); ++a) {
      x[a] += 0.5 * g.spacing(a);
      if (x[a] >= g.box.hi[a]) interior = false;
    }
    if (!interior) continue;
    if (std::isnan(field.value_at(x))) continue;
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace rotnft
