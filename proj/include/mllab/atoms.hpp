#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mllab/common.hpp"
#include "mllab/dyadic.hpp"
#include "mllab/moments.hpp"
#include "mllab/morrey.hpp"
#include "mllab/operators.hpp"

namespace mllab {

/// An atom: data supported in support_cube, optional vanishing moments up
/// to cancellation_degree (-1 means no moment condition).
struct Atom {
  DyadicCube support_cube;
  StepFunction data;
  int cancellation_degree = -1;
};

struct AtomFamily {
  std::vector<Atom> atoms;
  std::vector<double> coefficients;  // lambda_j >= 0
  double aggregation_v = 1.0;

  void validate_shape() const {
    if (atoms.size() != coefficients.size())
      throw std::invalid_argument("atom family: atoms/coefficients length mismatch");
    for (double l : coefficients)
      if (!(l >= 0.0)) throw std::invalid_argument("atom family: negative coefficient");
    if (!(aggregation_v > 0.0) || aggregation_v > 1.0)
      throw std::invalid_argument("atom family: aggregation exponent must lie in (0,1]");
  }
};

enum class AtomNormKind { weak_morrey, morrey_l1 };

/// Cancellation degree matched to an aggregation exponent v in (0,1]:
/// floor(n(1/v - 1)). At v = 1 this is 0 (zero-mean atoms); integer
/// arguments take the floor.
inline int cancellation_degree_for_aggregation(int dim, double v) {
  if (!(v > 0.0) || v > 1.0)
    throw std::domain_error("aggregation exponent must lie in (0,1]");
  return static_cast<int>(std::floor(dim * (1.0 / v - 1.0)));
}

struct AtomDiagnostics {
  bool pass = false;
  bool support_ok = false;
  double norm_ratio = 0.0;          // measured norm / |Q|^{1/s}
  double max_moment_residual = 0.0;
  std::string message;
};

/// Size, support and cancellation check against the atom-space
/// normalization ||a||_{WM^s_t} <= |Q|^{1/s} (or ||a||_{M^s_1} <= |Q|^{1/s}
/// for the morrey_l1 kind, where t is ignored).
inline AtomDiagnostics validate_atom(const Atom& a, double s, double t, AtomNormKind kind) {
  AtomDiagnostics d;
  d.support_ok = true;
  for (const auto& [k, v] : a.data.cells)
    if (!a.support_cube.contains(a.data.cell_cube(k))) d.support_ok = false;
  const double norm = kind == AtomNormKind::weak_morrey
                          ? weak_morrey_norm(a.data, s, t)
                          : morrey_lorentz_norm(a.data, MorreyLorentzParams(s, 1.0, 1.0));
  d.norm_ratio = norm / std::pow(a.support_cube.volume(), 1.0 / s);
  if (a.cancellation_degree >= 0)
    d.max_moment_residual = max_moment_residual(a.data, a.support_cube, a.cancellation_degree);
  d.pass = d.support_ok && d.norm_ratio <= 1.0 + 1e-12 && d.max_moment_residual <= 1e-10;
  if (!d.support_ok) d.message = "support escapes the cube";
  else if (d.norm_ratio > 1.0 + 1e-12) d.message = "size normalization exceeded";
  else if (d.max_moment_residual > 1e-10) d.message = "moment cancellation fails";
  return d;
}

/// Exact cellwise sum sum_j lambda_j a_j on the common refinement.
inline StepFunction synthesize(const AtomFamily& family) {
  family.validate_shape();
  if (family.atoms.empty()) return StepFunction(1, 0);
  int lvl = family.atoms.front().data.level;
  for (const Atom& a : family.atoms) lvl = std::max(lvl, a.data.level);
  StepFunction out(family.atoms.front().data.dim, lvl);
  for (std::size_t j = 0; j < family.atoms.size(); ++j) {
    const StepFunction aj = refine(family.atoms[j].data, lvl);
    for (const auto& [k, v] : aj.cells) {
      const double add = family.coefficients[j] * v;
      auto it = out.cells.find(k);
      if (it == out.cells.end())
        out.set(k, add);
      else if ((it->second += add) == 0.0)
        out.cells.erase(it);
    }
  }
  return out;
}

/// The coefficient aggregate (sum_j (lambda_j chi_{Q_j})^v)^{1/v} as a step
/// function on the common cube refinement.
inline StepFunction aggregate_function(const AtomFamily& family) {
  family.validate_shape();
  if (family.atoms.empty()) return StepFunction(1, 0);
  const double v = family.aggregation_v;
  int lvl = family.atoms.front().support_cube.level;
  for (const Atom& a : family.atoms) lvl = std::max(lvl, a.support_cube.level);
  StepFunction out(family.atoms.front().data.dim, lvl);
  for (std::size_t j = 0; j < family.atoms.size(); ++j) {
    const double lam = family.coefficients[j];
    if (lam == 0.0) continue;
    const DyadicCube& q = family.atoms[j].support_cube;
    const int s = lvl - q.level;
    const std::int64_t n = std::int64_t{1} << s;
    const std::int64_t n1 = out.dim == 2 ? n : 1;
    for (std::int64_t dx = 0; dx < n; ++dx)
      for (std::int64_t dy = 0; dy < n1; ++dy)
        out.cells[{(q.index[0] << s) + dx, out.dim == 2 ? (q.index[1] << s) + dy : 0}] +=
            std::pow(lam, v);
  }
  for (auto& [k, val] : out.cells) val = std::pow(val, 1.0 / v);
  return out;
}

inline double aggregate_norm(const AtomFamily& family, const MorreyLorentzParams& mp) {
  return morrey_lorentz_norm(aggregate_function(family), mp);
}

/// Synthesis-side estimate: ratio of ||sum lambda_j a_j||_{M^p_{q,r}} to the
/// coefficient aggregate norm, under the admissibility constraints
/// q < t, p < s, v < min(q,r). The bound constant is existential; suites
/// compare the empirical max against a recorded fixture.
inline RatioReport check_synthesis(const AtomFamily& family, const MorreyLorentzParams& mp,
                                   double s, double t) {
  family.validate_shape();
  mp.validate();
  if (!(t > 0.0) || !(t <= s) || is_inf(s))
    throw std::domain_error("check_synthesis: need 0 < t <= s < inf");
  if (!(mp.q < t)) throw std::domain_error("check_synthesis: constraint q < t violated");
  if (!(mp.p < s)) throw std::domain_error("check_synthesis: constraint p < s violated");
  if (!(family.aggregation_v < std::fmin(mp.q, mp.r)))
    throw std::domain_error("check_synthesis: constraint v < min(q,r) violated");
  for (const Atom& a : family.atoms)
    if (!validate_atom(a, s, t, AtomNormKind::weak_morrey).pass)
      throw std::domain_error("check_synthesis: atom fails validation");
  return make_ratio(morrey_lorentz_norm(synthesize(family), mp), aggregate_norm(family, mp));
}

/// Output of the Calderon-Zygmund style decomposition. The residual is the
/// degree-K polynomial part over the top cube; finite grids cannot cancel
/// nonzero moments at infinity, so it is kept first-class.
struct DecompositionResult {
  AtomFamily family;
  std::vector<int> thresholds;  // threshold exponent k per atom
  StepFunction residual;
  int k_min = 0;
  int k_max = 0;
};

namespace detail {

// Maximal dyadic cubes of {M_d f > 2^k} by descent from `top`; `avg` maps a
// cube to its |f|-average.
inline void collect_maximal_cubes(const DyadicCube& top, int bottom_level, double threshold,
                                  const std::function<double(const DyadicCube&)>& avg,
                                  std::vector<DyadicCube>& out) {
  if (avg(top) > threshold) {
    out.push_back(top);
    return;
  }
  if (top.level == bottom_level) return;
  for (const DyadicCube& c : top.children())
    collect_maximal_cubes(c, bottom_level, threshold, avg, out);
}

}  // namespace detail

/// Telescoping good-part construction over the thresholds 2^k:
/// Omega_k = {M_d f > 2^k}, {Q_{k,i}} its maximal dyadic cubes, g_k equal to
/// f off Omega_k and to the degree-K projection on each Q_{k,i}; the atoms
/// are (g_{k+1} - g_k) chi_{Q_{k,i}} normalized in sup norm. Reconstruction
/// f = sum lambda a + residual is exact by telescoping.
inline DecompositionResult decompose(const StepFunction& f, int K, double v) {
  if (f.empty()) throw std::domain_error("decompose: zero function");
  if (K < 0) throw std::domain_error("decompose: K must be >= 0");
  if (!(v > 0.0)) throw std::domain_error("decompose: v must be positive");

  const StepFunction md = dyadic_maximal(f);
  double md_max = 0.0, md_min = kInf;
  for (const auto& [k, val] : md.cells) {
    md_max = std::fmax(md_max, val);
    md_min = std::fmin(md_min, val);
  }
  int k_max = static_cast<int>(std::ceil(std::log2(md_max)));
  while (std::ldexp(1.0, k_max) < md_max) ++k_max;
  int k_min = static_cast<int>(std::floor(std::log2(md_min))) - 1;
  while (std::ldexp(1.0, k_min) >= md_min) --k_min;

  const DyadicCube top = f.domain_box().parent();

  // |f|-averages per dyadic ancestor cube.
  std::vector<std::map<CellIndex, double>> sums(f.level - top.level + 1);
  const double hvol = f.cell_measure();
  for (const auto& [k, val] : f.cells) sums[f.level - top.level][k] += std::fabs(val) * hvol;
  for (int m = f.level - top.level; m > 0; --m)
    for (const auto& [k, s] : sums[m])
      sums[m - 1][{detail::shift_down(k[0], 1), f.dim == 2 ? detail::shift_down(k[1], 1) : 0}] += s;
  auto avg = [&](const DyadicCube& c) {
    auto it = sums[c.level - top.level].find(c.index);
    return it == sums[c.level - top.level].end() ? 0.0 : it->second / c.volume();
  };

  auto good_part = [&](int k, std::vector<DyadicCube>& cubes) {
    cubes.clear();
    detail::collect_maximal_cubes(top, f.level, std::ldexp(1.0, k), avg, cubes);
    StepFunction g = f;
    for (const DyadicCube& q : cubes) {
      const StepFunction proj = project_polynomial(f, q, K);
      const int s = f.level - q.level;
      const std::int64_t n = std::int64_t{1} << s;
      const std::int64_t n1 = f.dim == 2 ? n : 1;
      for (std::int64_t dx = 0; dx < n; ++dx)
        for (std::int64_t dy = 0; dy < n1; ++dy) {
          const CellIndex cell{(q.index[0] << s) + dx, f.dim == 2 ? (q.index[1] << s) + dy : 0};
          g.set(cell, proj.at_cell(cell));
        }
    }
    return g;
  };

  DecompositionResult res;
  res.k_min = k_min;
  res.k_max = k_max;
  res.family.aggregation_v = v;

  std::vector<DyadicCube> cubes_k, cubes_next;
  StepFunction g_k = good_part(k_min, cubes_k);
  res.residual = g_k;
  // Differences below this are rounding residue of the telescoping, not
  // atoms; dropping them perturbs the reconstruction far below the 1e-10
  // guarantee.
  const double noise_floor = 1e-13 * f.sup_norm();
  for (int k = k_min; k < k_max; ++k) {
    const StepFunction g_next = good_part(k + 1, cubes_next);
    for (const DyadicCube& q : cubes_k) {
      StepFunction diff = restrict_to(combine(g_next, g_k, std::minus<double>()), q);
      const double lam = diff.sup_norm();
      if (lam <= noise_floor) continue;
      res.family.atoms.push_back(Atom{q, scale(diff, 1.0 / lam), K});
      res.family.coefficients.push_back(lam);
      res.thresholds.push_back(k);
    }
    g_k = g_next;
    cubes_k = cubes_next;
  }
  return res;
}

struct DecompositionGuarantees {
  double reconstruction_error = 0.0;   // max cellwise |f - (sum lambda a + residual)|
  double max_atom_excess = 0.0;        // max over atoms of ||a||_inf - 1
  double max_moment_residual = 0.0;
  double lambda_bound_constant = 0.0;  // max lambda / 2^k
  double pointwise_bound_constant = 0.0;  // min C' with aggregate <= C' M_d f
};

inline DecompositionGuarantees verify_decomposition(const StepFunction& f,
                                                    const DecompositionResult& res) {
  DecompositionGuarantees g;
  const StepFunction rebuilt = add(synthesize(res.family), res.residual);
  const StepFunction err = combine(rebuilt, f, std::minus<double>());
  g.reconstruction_error = err.sup_norm();
  for (std::size_t j = 0; j < res.family.atoms.size(); ++j) {
    const Atom& a = res.family.atoms[j];
    g.max_atom_excess = std::fmax(g.max_atom_excess, a.data.sup_norm() - 1.0);
    if (a.cancellation_degree >= 0)
      g.max_moment_residual = std::fmax(
          g.max_moment_residual,
          max_moment_residual(a.data, a.support_cube, a.cancellation_degree));
    g.lambda_bound_constant =
        std::fmax(g.lambda_bound_constant,
                  res.family.coefficients[j] * std::ldexp(1.0, -res.thresholds[j]));
  }
  const StepFunction md = dyadic_maximal(f);
  const StepFunction agg = refine(aggregate_function(res.family), md.level);
  for (const auto& [k, val] : agg.cells) {
    const double m = md.at_cell(k);
    if (m > 0.0) g.pointwise_bound_constant = std::fmax(g.pointwise_bound_constant, val / m);
  }
  return g;
}

/// Aggregate-to-function norm ratio of Theorem-style decompositions:
/// aggregate_norm(family at exponent v) / ||f||_{M^p_{q,r}}.
inline RatioReport check_decomposition_norm(const StepFunction& f, const DecompositionResult& res,
                                            const MorreyLorentzParams& mp, double v) {
  AtomFamily fam = res.family;
  fam.aggregation_v = v;
  return make_ratio(aggregate_norm(fam, mp), morrey_lorentz_norm(f, mp));
}

struct PairingReport {
  double pairing = 0.0;
  double bound = 0.0;  // l(Q)^{dim+K+1} sup_{y in Q} (1+|y|)^{-N}
  double ratio = 0.0;
};

/// |int a phi| against the cancellation bound l(Q)^{n+K+1} (1+dist(0,Q))^{-N};
/// phi is a step function built by the caller from exactly integrable data.
inline PairingReport check_atom_pairing(const Atom& a, const StepFunction& phi, int N) {
  PairingReport rep;
  rep.pairing = multiply(a.data, phi).integral();
  double dist = 0.0;
  for (int ax = 0; ax < a.support_cube.dim; ++ax) {
    const double d = std::fmax(0.0, std::fmax(a.support_cube.low(ax), -a.support_cube.high(ax)));
    dist = a.support_cube.dim == 1 ? d : std::hypot(dist, d);
  }
  const int K = std::max(a.cancellation_degree, -1);
  rep.bound = std::pow(a.support_cube.side(), a.support_cube.dim + K + 1) *
              std::pow(1.0 + dist, -static_cast<double>(N));
  rep.ratio = safe_ratio(std::fabs(rep.pairing), rep.bound);
  return rep;
}

}  // namespace mllab
