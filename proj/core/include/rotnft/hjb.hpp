#pragma once

#include "rotnft/system.hpp"

#include <cstdint>

namespace rotnft {

struct Lagrangian {
  std::function<double(const Vector&, const Vector2d&)> L;
  double bound = 1.0;  // A with |L| <= A
  double lip_x = 1.0;
};

struct GridSpec {
  Box box;
  std::vector<int> cells;  // per axis

  int dim() const { return static_cast<int>(cells.size()); }
  int nodes(int axis) const { return cells[static_cast<size_t>(axis)] + 1; }
  long node_count() const;
  double spacing(int axis) const {
    return (box.hi[axis] - box.lo[axis]) / cells[static_cast<size_t>(axis)];
  }
  Vector point(long flat) const;
  long flatten(const std::vector<int>& idx) const;

  static GridSpec uniform(const Box& box, int cells_per_axis);
};

// Finite subset of the closed unit disc: `dirs` directions x `radii` radii,
// plus the origin.
struct ControlMesh {
  std::vector<Vector2d> points;
  static ControlMesh disc(int dirs = 32, int radii = 4);
};

struct ValueIterationConfig {
  double tol = 1e-8;
  int max_sweeps = 6000;
  bool record_contraction = true;
};

struct ValueField {
  GridSpec grid;
  std::vector<double> v;            // NaN on masked / unviable nodes
  std::vector<std::uint8_t> viable; // 1 where V is defined
  double dt = 0.0;
  int sweeps = 0;
  double residual = 0.0;
  long masked_nodes = 0;   // h > 0
  long flagged_nodes = 0;  // feasible but no feasible control at mesh scale
  std::vector<double> contraction_history;

  // Multilinear interpolation restricted to fully viable cells, falling back
  // across shared faces; NaN when no such cell contains x.
  double value_at(const Vector& x) const;
};

ValueField value_iteration(const ControlAffineSystem& sys, const Constraint& con,
                           const Lagrangian& lag, const GridSpec& grid, double dt,
                           const ControlMesh& mesh,
                           const ValueIterationConfig& cfg = {});

// sup over the mesh of { -(f1 u1 + f2 u2) . p + L(x, u) }.
double hamiltonian(const ControlAffineSystem& sys, const Lagrangian& lag,
                   const Vector& x, const Vector& p, const ControlMesh& mesh);

struct ModulusReport {
  std::vector<double> r;          // bucket upper edges
  std::vector<double> omega_hat;  // max |V(x1) - V(x2)| per bucket
  std::vector<int> pairs;         // pairs landing in each bucket
  int skipped = 0;                // pairs with undefined V
};

ModulusReport continuity_probe(const ValueField& field,
                               const std::vector<std::pair<Vector, Vector>>& pairs,
                               const std::vector<double>& r_buckets);

// Feasible node pairs concentrated near the constraint boundary (and near the
// origin, where the singular set meets it in the built-in scenarios).
std::vector<std::pair<Vector, Vector>> boundary_pairs(const GridSpec& grid,
                                                      const Constraint& con,
                                                      double r_max, int max_pairs,
                                                      std::uint64_t seed);

struct ResidualReport {
  double median = 0.0;
  double q90 = 0.0;
  double max = 0.0;
  int n = 0;
};

// Consistency residual V + H(x, DV) - 2 L(x, 0) at interior cell centers,
// with DV the multilinear gradient. With the paper-style Hamiltonian carrying
// +L, subtracting 2L(x) reproduces the standard stationary equation for
// control-independent Lagrangians; the constant-L field then scores zero.
ResidualReport hjb_residual(const ControlAffineSystem& sys, const Lagrangian& lag,
                            const ValueField& field, const ControlMesh& mesh,
                            const std::vector<Vector>& samples);

// Interior fully-viable cell centers, up to max_n of them.
std::vector<Vector> interior_cell_centers(const ValueField& field, int max_n);

}  // namespace rotnft
