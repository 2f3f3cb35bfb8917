#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mllab/common.hpp"
#include "mllab/dyadic.hpp"
#include "mllab/lorentz.hpp"
#include "mllab/moments.hpp"
#include "mllab/morrey.hpp"

namespace mllab {

/// Exponents of the Lorentz-average maximal operator M^{(eta,theta)};
/// (1,1) is the Hardy-Littlewood operator M.
struct MaximalParams {
  double eta = 1.0;
  double theta = 1.0;

  MaximalParams() = default;
  MaximalParams(double e, double t) : eta(e), theta(t) { validate(); }
  void validate() const {
    if (!(eta > 0.0) || is_inf(eta)) throw std::domain_error("maximal: eta must be finite positive");
    if (!(theta > 0.0)) throw std::domain_error("maximal: theta must be positive");
  }
};

namespace detail {

// Lorentz norm of a (value, measure) multiset.
inline double lorentz_norm_of_pieces(std::vector<std::pair<double, double>>& pieces,
                                     const LorentzParams& lp) {
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  RearrangementProfile prof;
  double t = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    t += pieces[i].second;
    if (i + 1 < pieces.size() && pieces[i + 1].first == pieces[i].first) continue;
    if (pieces[i].first == 0.0) continue;
    prof.values.push_back(pieces[i].first);
    prof.cumulative.push_back(t);
  }
  return lorentz_norm(prof, lp);
}

struct EvalRegion {
  DyadicCube box;              // region over which eval cells run
  std::int64_t lo[2], hi[2];   // inclusive eval-cell index range per axis
};

inline EvalRegion make_region(const DyadicCube& box, int eval_level) {
  EvalRegion r;
  r.box = box;
  const int s = eval_level - box.level;
  for (int a = 0; a < 2; ++a) {
    r.lo[a] = box.index[a] << s;
    r.hi[a] = ((box.index[a] + 1) << s) - 1;
  }
  return r;
}

}  // namespace detail

/// M^{(eta,theta)} f at the eval-grid cell centers over `region`.
///
/// The candidate cube family is every axis-parallel cube whose corners lie
/// on the eval grid and whose side is a multiple of the eval cell side,
/// capped at twice the region side (4x the domain box for the default
/// region). This family attains the sup over all cubes of a step function
/// up to one grid step; the cell itself is always a candidate, so
/// M f >= |f| holds exactly.
inline StepFunction maximal(const StepFunction& f, const MaximalParams& mp, int eval_level,
                            const DyadicCube& region_box) {
  mp.validate();
  if (eval_level < f.level) throw std::domain_error("maximal: eval_level below grid level");
  if (f.empty()) return StepFunction(f.dim, eval_level);

  const detail::EvalRegion region = detail::make_region(region_box, eval_level);
  const double hvol = std::ldexp(1.0, -eval_level * f.dim);
  const int rs = eval_level - f.level;  // f cell = 2^rs eval cells per axis
  const std::int64_t cap = std::int64_t{2} << (eval_level - region_box.level);
  const LorentzParams letaq(mp.eta, mp.theta);
  const double chi_const = indicator_lorentz_constant(mp.eta, mp.theta);
  const bool hl = mp.eta == 1.0 && mp.theta == 1.0;

  // Support bounding box in eval units.
  std::int64_t slo[2] = {0, 0}, shi[2] = {0, 0};
  bool first = true;
  for (const auto& [k, v] : f.cells)
    for (int a = 0; a < f.dim; ++a) {
      const std::int64_t lo = k[a] << rs, hi = ((k[a] + 1) << rs) - 1;
      if (first || lo < slo[a]) slo[a] = lo;
      if (first || hi > shi[a]) shi[a] = hi;
      if (a == f.dim - 1) first = false;
    }

  // Seed with the own-cell value so M f >= |f| exactly.
  StepFunction out(f.dim, eval_level);
  const StepFunction fe = refine(f, eval_level);
  std::map<CellIndex, double> best;
  for (std::int64_t i = region.lo[0]; i <= region.hi[0]; ++i)
    for (std::int64_t j = region.lo[1]; j <= (f.dim == 2 ? region.hi[1] : region.lo[1]); ++j)
      best[{i, f.dim == 2 ? j : 0}] = std::fabs(fe.at_cell({i, f.dim == 2 ? j : 0}));

  std::vector<std::pair<double, double>> pieces;
  for (std::int64_t side = 1; side <= cap; ++side) {
    const std::int64_t a0_min = std::max(region.lo[0], slo[0]) - side + 1;
    const std::int64_t a0_max = std::min(region.hi[0], shi[0]);
    for (std::int64_t a0 = a0_min; a0 <= a0_max; ++a0) {
      const std::int64_t a1_min =
          f.dim == 2 ? std::max(region.lo[1] - side + 1, slo[1] - side + 1) : 0;
      const std::int64_t a1_max = f.dim == 2 ? std::min(region.hi[1], shi[1]) : 0;
      for (std::int64_t a1 = a1_min; a1 <= a1_max; ++a1) {
        // ||f chi_Q|| over the cube [a0,a0+side) x [a1,a1+side) in eval units.
        double l1 = 0.0;
        pieces.clear();
        for (const auto& [k, v] : f.cells) {
          const std::int64_t c0_lo = k[0] << rs, c0_hi = (k[0] + 1) << rs;
          std::int64_t ov = std::max<std::int64_t>(
              0, std::min(c0_hi, a0 + side) - std::max(c0_lo, a0));
          if (ov == 0) continue;
          if (f.dim == 2) {
            const std::int64_t c1_lo = k[1] << rs, c1_hi = (k[1] + 1) << rs;
            const std::int64_t ov1 = std::max<std::int64_t>(
                0, std::min(c1_hi, a1 + side) - std::max(c1_lo, a1));
            if (ov1 == 0) continue;
            ov *= ov1;
          }
          const double meas = static_cast<double>(ov) * hvol;
          if (hl)
            l1 += std::fabs(v) * meas;
          else
            pieces.emplace_back(std::fabs(v), meas);
        }
        const double qvol = std::pow(static_cast<double>(side), f.dim) * hvol;
        double ratio;
        if (hl)
          ratio = l1 / qvol;
        else {
          if (pieces.empty()) continue;
          ratio = detail::lorentz_norm_of_pieces(pieces, letaq) /
                  (chi_const * std::pow(qvol, 1.0 / mp.eta));
        }
        if (ratio == 0.0) continue;
        const std::int64_t i_lo = std::max(a0, region.lo[0]),
                           i_hi = std::min(a0 + side - 1, region.hi[0]);
        const std::int64_t j_lo = f.dim == 2 ? std::max(a1, region.lo[1]) : 0,
                           j_hi = f.dim == 2 ? std::min(a1 + side - 1, region.hi[1]) : 0;
        for (std::int64_t i = i_lo; i <= i_hi; ++i)
          for (std::int64_t j = j_lo; j <= j_hi; ++j) {
            auto it = best.find({i, f.dim == 2 ? j : 0});
            if (it != best.end() && ratio > it->second) it->second = ratio;
          }
      }
    }
  }
  for (const auto& [k, v] : best) out.set(k, v);
  return out;
}

inline StepFunction maximal(const StepFunction& f, const MaximalParams& mp, int eval_level) {
  return maximal(f, mp, eval_level, f.domain_box().parent());
}

/// Dyadic maximal function: max over dyadic ancestors of each cell (up to
/// the parent of domain_box) of the average of |f|. Exact integer-shift
/// geometry; drives the decomposition level sets.
inline StepFunction dyadic_maximal(const StepFunction& f) {
  if (f.empty()) return StepFunction(f.dim, f.level);
  const DyadicCube top = f.domain_box().parent();
  // |f|-sums per ancestor level.
  std::vector<std::map<CellIndex, double>> sums(f.level - top.level + 1);
  const double hvol = f.cell_measure();
  for (const auto& [k, v] : f.cells) sums[f.level - top.level][k] += std::fabs(v) * hvol;
  for (int m = f.level - top.level; m > 0; --m)
    for (const auto& [k, s] : sums[m])
      sums[m - 1][{detail::shift_down(k[0], 1), f.dim == 2 ? detail::shift_down(k[1], 1) : 0}] += s;

  StepFunction out(f.dim, f.level);
  const detail::EvalRegion region = detail::make_region(top, f.level);
  for (std::int64_t i = region.lo[0]; i <= region.hi[0]; ++i)
    for (std::int64_t j = region.lo[1]; j <= (f.dim == 2 ? region.hi[1] : region.lo[1]); ++j) {
      CellIndex k{i, f.dim == 2 ? j : 0};
      double m = 0.0;
      for (int lvl = f.level; lvl >= top.level; --lvl) {
        auto it = sums[lvl - top.level].find(k);
        if (it != sums[lvl - top.level].end())
          m = std::fmax(m, it->second / std::ldexp(1.0, -lvl * f.dim));
        k = {detail::shift_down(k[0], 1), f.dim == 2 ? detail::shift_down(k[1], 1) : 0};
      }
      out.set({i, f.dim == 2 ? j : 0}, m);
    }
  return out;
}

/// Riesz potential exponent, 0 < alpha < dim.
struct FracIntegralParams {
  double alpha = 0.5;

  FracIntegralParams() = default;
  explicit FracIntegralParams(double a) : alpha(a) {}
  void validate(int dim) const {
    if (!(alpha > 0.0) || !(alpha < dim))
      throw std::domain_error("fractional integral requires 0 < alpha < dim");
  }
};

namespace detail {

// Exact integral of |x-y|^{alpha-1} over [a,b), dimension 1.
inline double riesz_segment(double a, double b, double x, double alpha) {
  if (x <= a) return (std::pow(b - x, alpha) - std::pow(a - x, alpha)) / alpha;
  if (x >= b) return (std::pow(x - a, alpha) - std::pow(x - b, alpha)) / alpha;
  return (std::pow(x - a, alpha) + std::pow(b - x, alpha)) / alpha;
}

// Midpoint quadrature of |x-y|^{alpha-2} over a 2-d cell split n x n; the
// subcell holding x is replaced by the equal-area disc integral
// 2 pi rho^alpha / alpha.
inline double riesz_cell_2d(double ax, double bx, double ay, double by,
                            const std::array<double, 2>& x, double alpha, int n) {
  const double hx = (bx - ax) / n, hy = (by - ay) / n;
  const double sub_area = hx * hy;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double cx = ax + (i + 0.5) * hx, cy = ay + (j + 0.5) * hy;
      const bool holds_x = x[0] >= ax + i * hx && x[0] < ax + (i + 1) * hx &&
                           x[1] >= ay + j * hy && x[1] < ay + (j + 1) * hy;
      if (holds_x) {
        const double rho = std::sqrt(sub_area / M_PI);
        acc += 2.0 * M_PI * std::pow(rho, alpha) / alpha;
        continue;
      }
      const double d = std::hypot(x[0] - cx, x[1] - cy);
      acc += std::pow(d, alpha - 2.0) * sub_area;
    }
  return acc;
}

}  // namespace detail

/// Pointwise I_alpha f(x). Dimension 1 uses the exact antiderivative per
/// cell; dimension 2 uses midpoint quadrature (refinement 2 away from x,
/// 8x8 subdivision on the containing/adjacent cells).
inline double frac_integral_at(const StepFunction& f, double alpha, std::array<double, 2> x) {
  FracIntegralParams(alpha).validate(f.dim);
  double acc = 0.0;
  if (f.dim == 1) {
    const double h = std::ldexp(1.0, -f.level);
    for (const auto& [k, v] : f.cells)
      acc += v * detail::riesz_segment(k[0] * h, (k[0] + 1) * h, x[0], alpha);
    return acc;
  }
  const double h = std::ldexp(1.0, -f.level);
  const std::int64_t cx = static_cast<std::int64_t>(std::floor(x[0] / h));
  const std::int64_t cy = static_cast<std::int64_t>(std::floor(x[1] / h));
  for (const auto& [k, v] : f.cells) {
    const bool singular = std::llabs(k[0] - cx) <= 1 && std::llabs(k[1] - cy) <= 1;
    acc += v * detail::riesz_cell_2d(k[0] * h, (k[0] + 1) * h, k[1] * h, (k[1] + 1) * h, x,
                                     alpha, singular ? 8 : 4);
  }
  return acc;
}

/// I_alpha f sampled at eval-grid cell centers over an explicit dyadic
/// window. The tail outside the window is dropped; suites track the
/// sensitivity via refinement deltas.
inline StepFunction frac_integral(const StepFunction& f, const FracIntegralParams& fp,
                                  int eval_level, const DyadicCube& window) {
  fp.validate(f.dim);
  if (f.empty()) return StepFunction(f.dim, eval_level);
  if (eval_level < f.level) throw std::domain_error("frac_integral: eval_level below grid level");
  const detail::EvalRegion region = detail::make_region(window, eval_level);
  const double h = std::ldexp(1.0, -eval_level);
  StepFunction out(f.dim, eval_level);
  for (std::int64_t i = region.lo[0]; i <= region.hi[0]; ++i)
    for (std::int64_t j = region.lo[1]; j <= (f.dim == 2 ? region.hi[1] : region.lo[1]); ++j) {
      const std::array<double, 2> x{(i + 0.5) * h, f.dim == 2 ? (j + 0.5) * h : 0.0};
      out.set({i, f.dim == 2 ? j : 0}, frac_integral_at(f, fp.alpha, x));
    }
  return out;
}

/// Window defaulted to `window_levels` dyadic ancestors above domain_box.
inline StepFunction frac_integral(const StepFunction& f, const FracIntegralParams& fp,
                                  int eval_level, int window_levels = 2) {
  fp.validate(f.dim);
  if (f.empty()) return StepFunction(f.dim, eval_level);
  DyadicCube window = f.domain_box();
  for (int i = 0; i < window_levels; ++i) window = window.parent();
  return frac_integral(f, fp, eval_level, window);
}

struct FracLowerReport {
  double min_ratio = 0.0;  // min over Q of I_alpha chi_Q / l(Q)^alpha
  int refine_levels = 0;
};

/// Lower-bound constant of I_alpha chi_Q on Q, sampled at the cell centers
/// of Q refined `refine_levels` deeper. Scale-invariant in Q.
inline FracLowerReport check_frac_lower_bound(const DyadicCube& q, double alpha,
                                              int refine_levels = 5) {
  FracIntegralParams(alpha).validate(q.dim);
  StepFunction chi(q.dim, q.level);
  chi.set(q.index, 1.0);
  const int lvl = q.level + refine_levels;
  const detail::EvalRegion region = detail::make_region(q, lvl);
  const double h = std::ldexp(1.0, -lvl);
  double mn = kInf;
  for (std::int64_t i = region.lo[0]; i <= region.hi[0]; ++i)
    for (std::int64_t j = region.lo[1]; j <= (q.dim == 2 ? region.hi[1] : region.lo[1]); ++j) {
      const std::array<double, 2> x{(i + 0.5) * h, q.dim == 2 ? (j + 0.5) * h : 0.0};
      mn = std::fmin(mn, frac_integral_at(chi, alpha, x));
    }
  return FracLowerReport{mn / std::pow(q.side(), alpha), refine_levels};
}

struct AtomDecayReport {
  std::vector<double> ratios;  // one per ring k = 1..k_max
  double max_ratio = 0.0;
};

/// Decay profile of I_alpha applied to a K-cancelling atom: on each ring
/// 2^k Q \ 2^{k-1} Q, max |I_alpha A| divided by
/// ||A||_inf l(Q)^alpha 2^{-k(dim+K+1-alpha)}.
inline AtomDecayReport check_atom_decay(const StepFunction& a, const DyadicCube& q, int K,
                                        double alpha, int k_max = 6) {
  FracIntegralParams(alpha).validate(a.dim);
  for (const auto& [k, v] : a.cells)
    if (!q.contains(DyadicCube(a.dim, a.level, k)))
      throw std::domain_error("check_atom_decay: atom not supported in the cube");
  if (K >= 0 && max_moment_residual(a, q, K) > 1e-8)
    throw std::domain_error("check_atom_decay: moment cancellation fails");
  AtomDecayReport rep;
  const double sup = a.sup_norm();
  if (sup == 0.0) {
    rep.ratios.assign(k_max, 0.0);
    return rep;
  }
  const double len = q.side();
  const int samples = 16;
  for (int k = 1; k <= k_max; ++k) {
    const double outer = std::ldexp(len, k - 1);  // half-side of 2^k Q
    const double inner = std::ldexp(len, k - 2);
    double mx = 0.0;
    auto visit = [&](const std::array<double, 2>& x) {
      mx = std::fmax(mx, std::fabs(frac_integral_at(a, alpha, x)));
    };
    if (a.dim == 1) {
      const double c = q.center(0);
      for (int s = 0; s < samples; ++s) {
        const double d = inner + (s + 0.5) * (outer - inner) / samples;
        visit({c + d, 0.0});
        visit({c - d, 0.0});
      }
    } else {
      const double c0 = q.center(0), c1 = q.center(1);
      for (int s = 0; s < samples; ++s)
        for (int t = 0; t < samples; ++t) {
          const double x0 = c0 - outer + (s + 0.5) * 2.0 * outer / samples;
          const double x1 = c1 - outer + (t + 0.5) * 2.0 * outer / samples;
          if (std::fabs(x0 - c0) < inner && std::fabs(x1 - c1) < inner) continue;
          visit({x0, x1});
        }
    }
    const double denom =
        sup * std::pow(len, alpha) * std::pow(2.0, -k * (a.dim + K + 1 - alpha));
    rep.ratios.push_back(mx / denom);
    rep.max_ratio = std::fmax(rep.max_ratio, rep.ratios.back());
  }
  return rep;
}

/// Heat-flow parameters: evaluation times and the grid refinement used for
/// the cell-center sampling.
struct HeatParams {
  std::vector<double> t_grid;
  int quadrature_level = 2;

  void validate() const {
    if (t_grid.empty()) throw std::domain_error("heat: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      if (!(t_grid[i] > 0.0)) throw std::domain_error("heat: times must be positive");
      if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
        throw std::domain_error("heat: t grid must be strictly increasing");
    }
  }

  /// Geometric default {4^-j : j = -2..12}, ascending.
  static HeatParams default_grid() {
    HeatParams hp;
    for (int j = 12; j >= -2; --j) hp.t_grid.push_back(std::pow(4.0, -j));
    return hp;
  }
};

/// e^{t Delta} f at eval-grid cell centers; the Gaussian integral over each
/// source cell is the exact per-axis error-function antiderivative.
inline StepFunction heat_extension(const StepFunction& f, double t, int eval_level,
                                   int window_levels = 2) {
  if (!(t > 0.0)) throw std::domain_error("heat_extension: t must be positive");
  if (f.empty()) return StepFunction(f.dim, eval_level);
  if (eval_level < f.level)
    throw std::domain_error("heat_extension: eval_level below grid level");
  DyadicCube window = f.domain_box();
  for (int i = 0; i < window_levels; ++i) window = window.parent();
  const detail::EvalRegion region = detail::make_region(window, eval_level);
  const double h = std::ldexp(1.0, -eval_level);
  const double hs = std::ldexp(1.0, -f.level);
  const double inv = 1.0 / (2.0 * std::sqrt(t));
  auto axis_factor = [&](double x, double a, double b) {
    return 0.5 * (std::erf((x - a) * inv) - std::erf((x - b) * inv));
  };
  StepFunction out(f.dim, eval_level);
  for (std::int64_t i = region.lo[0]; i <= region.hi[0]; ++i)
    for (std::int64_t j = region.lo[1]; j <= (f.dim == 2 ? region.hi[1] : region.lo[1]); ++j) {
      const double x0 = (i + 0.5) * h, x1 = f.dim == 2 ? (j + 0.5) * h : 0.0;
      double acc = 0.0;
      for (const auto& [k, v] : f.cells) {
        double w = axis_factor(x0, k[0] * hs, (k[0] + 1) * hs);
        if (f.dim == 2) w *= axis_factor(x1, k[1] * hs, (k[1] + 1) * hs);
        acc += v * w;
      }
      out.set({i, f.dim == 2 ? j : 0}, acc);
    }
  return out;
}

/// Finite-t-grid lower approximation of the heat-maximal quasi-norm:
/// Morrey-Lorentz norm of the cellwise max of |e^{t Delta} f| over t_grid.
inline double heat_maximal_norm(const StepFunction& f, const HeatParams& hp,
                                const MorreyLorentzParams& mp) {
  hp.validate();
  if (f.empty()) return 0.0;
  const int eval_level = f.level + hp.quadrature_level;
  StepFunction peak(f.dim, eval_level);
  for (double t : hp.t_grid) {
    const StepFunction ht = heat_extension(f, t, eval_level);
    for (const auto& [k, v] : ht.cells) {
      const double av = std::fabs(v);
      auto it = peak.cells.find(k);
      if (it == peak.cells.end())
        peak.set(k, av);
      else
        it->second = std::fmax(it->second, av);
    }
  }
  return morrey_lorentz_norm(peak, mp);
}

/// Vector-valued (Fefferman-Stein) maximal ratio
///   || (sum_j (M f_j)^u)^{1/u} || / || (sum_j |f_j|^u)^{1/u} ||
/// in M^p_{q,r}; u = inf takes cellwise sups. All members are evaluated on
/// one grid over the parent of the family's common dyadic hull.
inline RatioReport check_fefferman_stein(const std::vector<StepFunction>& family, double u,
                                         const MorreyLorentzParams& mp, int eval_level) {
  if (family.empty()) throw std::domain_error("check_fefferman_stein: empty family");
  if (is_inf(u)) {
    if (!(mp.q > 1.0)) throw std::domain_error("fefferman-stein (sup case) requires q > 1");
  } else {
    if (!(u > 1.0)) throw std::domain_error("fefferman-stein requires 1 < u");
    if (!(mp.q > 1.0) || !(mp.r > 1.0))
      throw std::domain_error("fefferman-stein requires 1 < q and 1 < r");
  }
  // Common hull of the supports.
  StepFunction hull = abs_of(family.front());
  for (std::size_t i = 1; i < family.size(); ++i) hull = add(hull, abs_of(family[i]));
  const DyadicCube top = hull.domain_box().parent();

  const MaximalParams m11(1.0, 1.0);
  StepFunction num_acc(family.front().dim, eval_level);
  StepFunction den_acc(hull.dim, hull.level);
  bool first = true;
  for (const StepFunction& fj : family) {
    const StepFunction mf = maximal(fj, m11, eval_level, top);
    const StepFunction aj = refine(abs_of(fj), hull.level);
    auto fold = [&](StepFunction& acc, const StepFunction& g) {
      if (first) {
        acc = is_inf(u) ? g : combine(g, g, [&](double x, double) { return std::pow(x, u); });
        return;
      }
      acc = combine(acc, g, [&](double x, double y) {
        return is_inf(u) ? std::fmax(x, y) : x + std::pow(y, u);
      });
    };
    fold(num_acc, mf);
    fold(den_acc, aj);
    first = false;
  }
  auto root = [&](const StepFunction& g) {
    if (is_inf(u)) return g;
    return combine(g, g, [&](double x, double) { return std::pow(x, 1.0 / u); });
  };
  return make_ratio(morrey_lorentz_norm(root(num_acc), mp),
                    morrey_lorentz_norm(root(den_acc), mp));
}

}  // namespace mllab
