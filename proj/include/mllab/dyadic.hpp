#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "mllab/common.hpp"

namespace mllab {

/// Cell index of a dyadic grid; index[1] stays 0 in dimension 1.
using CellIndex = std::array<std::int64_t, 2>;

namespace detail {

// Floor division by 2^s for signed indices (C++20 signed shift is arithmetic).
inline std::int64_t shift_down(std::int64_t k, int s) { return k >> s; }

inline void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
}

}  // namespace detail

/// Dyadic cube 2^-level * [k, k+1)^dim. Negative levels give large cubes.
struct DyadicCube {
  int dim = 1;
  int level = 0;
  CellIndex index{0, 0};

  DyadicCube() = default;
  DyadicCube(int d, int lv, CellIndex idx) : dim(d), level(lv), index(idx) {
    detail::check_dim(dim);
    if (dim == 1) index[1] = 0;
  }

  double side() const { return std::ldexp(1.0, -level); }
  double volume() const { return std::ldexp(1.0, -level * dim); }
  double low(int axis) const { return static_cast<double>(index[axis]) * side(); }
  double high(int axis) const { return static_cast<double>(index[axis] + 1) * side(); }
  double center(int axis) const { return (static_cast<double>(index[axis]) + 0.5) * side(); }

  DyadicCube parent() const {
    return DyadicCube(dim, level - 1,
                      {detail::shift_down(index[0], 1), detail::shift_down(index[1], 1)});
  }

  std::vector<DyadicCube> children() const {
    std::vector<DyadicCube> out;
    const int n1 = dim == 2 ? 2 : 1;
    for (std::int64_t dx = 0; dx < 2; ++dx)
      for (std::int64_t dy = 0; dy < n1; ++dy)
        out.push_back(DyadicCube(dim, level + 1, {2 * index[0] + dx, 2 * index[1] + dy}));
    return out;
  }

  /// Decidable by integer shifts only: true iff `other` is a (weak) descendant.
  bool contains(const DyadicCube& other) const {
    if (other.level < level) return false;
    const int s = other.level - level;
    for (int a = 0; a < dim; ++a)
      if (detail::shift_down(other.index[a], s) != index[a]) return false;
    return true;
  }

  bool operator==(const DyadicCube& o) const {
    return dim == o.dim && level == o.level && index == o.index;
  }
  bool operator<(const DyadicCube& o) const {
    if (level != o.level) return level < o.level;
    return index < o.index;
  }
};

inline bool disjoint(const DyadicCube& a, const DyadicCube& b) {
  return !a.contains(b) && !b.contains(a);
}

/// Finite set of same-level cells; exact measure card * 2^{-level*dim}.
struct GridIndexSet {
  int dim = 1;
  int level = 0;
  std::set<CellIndex> cells;

  double measure() const {
    return static_cast<double>(cells.size()) * std::ldexp(1.0, -level * dim);
  }
};

/// Finite simple function: values on cells of one dyadic grid, absent = 0.
/// Zero values are never stored, so `cells` is exactly the support.
struct StepFunction {
  int dim = 1;
  int level = 0;
  std::map<CellIndex, double> cells;

  StepFunction() = default;
  StepFunction(int d, int lv) : dim(d), level(lv) { detail::check_dim(d); }

  bool empty() const { return cells.empty(); }
  double cell_measure() const { return std::ldexp(1.0, -level * dim); }

  StepFunction& set(CellIndex idx, double v) {
    if (dim == 1) idx[1] = 0;
    if (v == 0.0)
      cells.erase(idx);
    else
      cells[idx] = v;
    return *this;
  }

  double at_cell(CellIndex idx) const {
    if (dim == 1) idx[1] = 0;
    auto it = cells.find(idx);
    return it == cells.end() ? 0.0 : it->second;
  }

  /// Pointwise value; x is mapped to its grid cell by floor.
  double value_at(std::array<double, 2> x) const {
    const double s = std::ldexp(1.0, level);
    CellIndex idx{static_cast<std::int64_t>(std::floor(x[0] * s)),
                  dim == 2 ? static_cast<std::int64_t>(std::floor(x[1] * s)) : 0};
    return at_cell(idx);
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& [k, v] : cells) m = std::fmax(m, std::fabs(v));
    return m;
  }

  /// Exact integral: sum of value * cell measure.
  double integral() const {
    double s = 0.0;
    const double h = cell_measure();
    for (const auto& [k, v] : cells) s += v * h;
    return s;
  }

  DyadicCube cell_cube(const CellIndex& idx) const { return DyadicCube(dim, level, idx); }

  /// Smallest dyadic cube containing the support. Dyadic ancestors never
  /// cross 0 on an axis, so a support straddling 0 has no such cube and we
  /// refuse it rather than silently truncate.
  DyadicCube domain_box() const {
    if (cells.empty()) throw std::domain_error("domain_box of the zero function");
    CellIndex lo = cells.begin()->first, hi = lo;
    for (const auto& [k, v] : cells)
      for (int a = 0; a < dim; ++a) {
        lo[a] = std::min(lo[a], k[a]);
        hi[a] = std::max(hi[a], k[a]);
      }
    for (int a = 0; a < dim; ++a)
      if (lo[a] < 0 && hi[a] >= 0)
        throw std::domain_error("support straddles 0; no dyadic cube contains it");
    int s = 0;
    while (s < 62) {
      bool same = true;
      for (int a = 0; a < dim; ++a)
        if (detail::shift_down(lo[a], s) != detail::shift_down(hi[a], s)) same = false;
      if (same) break;
      ++s;
    }
    return DyadicCube(dim, level - s,
                      {detail::shift_down(lo[0], s), dim == 2 ? detail::shift_down(lo[1], s) : 0});
  }
};

/// Pointwise-identical copy on a finer grid; each cell splits into
/// 2^{dim*(target-level)} children with the same value.
inline StepFunction refine(const StepFunction& f, int target_level) {
  if (target_level < f.level) throw std::domain_error("coarsening is lossy");
  if (target_level == f.level) return f;
  const int s = target_level - f.level;
  const std::int64_t n = std::int64_t{1} << s;
  StepFunction out(f.dim, target_level);
  for (const auto& [k, v] : f.cells) {
    const std::int64_t n1 = f.dim == 2 ? n : 1;
    for (std::int64_t dx = 0; dx < n; ++dx)
      for (std::int64_t dy = 0; dy < n1; ++dy)
        out.cells[{(k[0] << s) + dx, f.dim == 2 ? (k[1] << s) + dy : 0}] = v;
  }
  return out;
}

/// Relabel levels: g(x) = f(2^m x), realized exactly by level += m.
inline StepFunction dilate(const StepFunction& f, int m) {
  StepFunction out(f.dim, f.level + m);
  out.cells = f.cells;
  return out;
}

inline StepFunction scale(const StepFunction& f, double c) {
  StepFunction out(f.dim, f.level);
  if (c == 0.0) return out;
  for (const auto& [k, v] : f.cells) out.cells[k] = c * v;
  return out;
}

inline StepFunction abs_of(const StepFunction& f) {
  StepFunction out(f.dim, f.level);
  for (const auto& [k, v] : f.cells) out.cells[k] = std::fabs(v);
  return out;
}

/// Cellwise op on the common refinement; cells where op yields 0 are dropped.
inline StepFunction combine(const StepFunction& a, const StepFunction& b,
                            const std::function<double(double, double)>& op) {
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
  const int lv = std::max(a.level, b.level);
  const StepFunction fa = refine(a, lv), fb = refine(b, lv);
  StepFunction out(a.dim, lv);
  for (const auto& [k, v] : fa.cells) out.set(k, op(v, fb.at_cell(k)));
  for (const auto& [k, v] : fb.cells)
    if (fa.cells.find(k) == fa.cells.end()) out.set(k, op(0.0, v));
  return out;
}

inline StepFunction add(const StepFunction& a, const StepFunction& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

inline StepFunction multiply(const StepFunction& a, const StepFunction& b) {
  return combine(a, b, [](double x, double y) { return x * y; });
}

/// Restriction f * chi_Q for a dyadic cube at level <= f.level.
inline StepFunction restrict_to(const StepFunction& f, const DyadicCube& q) {
  if (q.level > f.level)
    throw std::invalid_argument("restrict_to: cube finer than the grid");
  const int s = f.level - q.level;
  StepFunction out(f.dim, f.level);
  for (const auto& [k, v] : f.cells) {
    bool inside = detail::shift_down(k[0], s) == q.index[0];
    if (f.dim == 2) inside = inside && detail::shift_down(k[1], s) == q.index[1];
    if (inside) out.cells[k] = v;
  }
  return out;
}

/// The finite cube family over which every norm sup in this library runs:
/// all dyadic cubes meeting supp(f) with level in [domain_box.level - 1,
/// f.level].
///
/// Why this family realizes the full dyadic sup exactly: a cube strictly
/// inside one grid cell sees a constant value v, so its Morrey summand is
/// (q/r)^{1/r} |v| |Q|^{1/p}, increasing in |Q|, and the whole cell (which is
/// in the family) dominates it. A cube containing domain_box has constant
/// ||f chi_Q||_{L^{q,r}} while |Q|^{1/p-1/q} is non-increasing in |Q| because
/// q <= p, so domain_box itself dominates; we still include its parent.
inline std::vector<DyadicCube> enumerate_cubes(const StepFunction& f) {
  if (f.empty()) return {};
  const DyadicCube box = f.domain_box();
  std::vector<DyadicCube> out;
  for (int m = box.level - 1; m <= f.level; ++m) {
    const int s = f.level - m;
    std::set<CellIndex> idx;
    for (const auto& [k, v] : f.cells)
      idx.insert({detail::shift_down(k[0], s),
                  f.dim == 2 ? detail::shift_down(k[1], s) : 0});
    for (const auto& k : idx) out.push_back(DyadicCube(f.dim, m, k));
  }
  return out;
}

}  // namespace mllab
