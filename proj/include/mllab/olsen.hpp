#pragma once

#include <cmath>
#include <string>

#include "mllab/common.hpp"
#include "mllab/dyadic.hpp"
#include "mllab/lorentz.hpp"
#include "mllab/morrey.hpp"
#include "mllab/operators.hpp"

namespace mllab {

/// Exponents of the Olsen inequality
///   ||g . I_alpha f||_{M^{r0}_{r1,r2}} <= C ||g||_{WM^{q0}_{q1}} ||f||_{M^{p0}_{p1,p2}}
/// with each constraint named on violation. Case 1 keeps all ratios
/// r0/p0 = r1/p1 = r2/p2 finite; case 2 has r2 = p2 = inf.
struct OlsenParams {
  double alpha = 0.5;
  double p0 = 1.5, p1 = 1.25, p2 = 1.25;
  double q0 = 2.0, q1 = 1.5;
  double r0 = 1.5, r1 = 1.25, r2 = 1.25;
  int dim = 1;

  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::domain_error("olsen constraint violated: " + what);
    };
    const double n = dim;
    if (!(alpha > 0.0 && alpha < n)) fail("0 < alpha < n");
    if (!(1.0 < p1 && p1 <= p0 && !is_inf(p0))) fail("1 < p1 <= p0 < inf");
    if (!(p2 > 0.0)) fail("0 < p2 <= inf");
    if (!(1.0 < q1 && q1 <= q0 && !is_inf(q0))) fail("1 < q1 <= q0 < inf");
    if (!(1.0 < r1 && r1 <= r0 && !is_inf(r0))) fail("1 < r1 <= r0 < inf");
    if (!(r2 > 1.0)) fail("1 < r2 <= inf");
    if (!(r1 < q1)) fail("r1 < q1");
    if (!(1.0 / q0 <= alpha / n)) fail("1/q0 <= alpha/n");
    if (!(alpha / n < 1.0 / p0)) fail("alpha/n < 1/p0");
    if (std::fabs(1.0 / r0 - (1.0 / q0 + 1.0 / p0 - alpha / n)) > 1e-12)
      fail("1/r0 = 1/q0 + 1/p0 - alpha/n");
    if (is_inf(r2) || is_inf(p2)) {
      if (!(is_inf(r2) && is_inf(p2))) fail("case 2 needs r2 = p2 = inf");
      if (std::fabs(r0 / p0 - r1 / p1) > 1e-12) fail("r0/p0 = r1/p1");
    } else {
      if (std::fabs(r0 / p0 - r1 / p1) > 1e-12 || std::fabs(r0 / p0 - r2 / p2) > 1e-12)
        fail("r0/p0 = r1/p1 = r2/p2");
    }
  }
};

struct OlsenReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  int eval_level = 0;
  double refinement_delta = 0.0;  // |ratio(eval+1)/ratio(eval) - 1|
};

namespace detail {

inline double olsen_ratio(const StepFunction& f, const StepFunction& g, const OlsenParams& op,
                          int eval_level, int window_levels, double* lhs_out, double* rhs_out) {
  // the product window covers both supports so g never falls outside the
  // I_alpha evaluation region
  DyadicCube window = add(abs_of(f), abs_of(g)).domain_box();
  for (int i = 0; i < window_levels; ++i) window = window.parent();
  const StepFunction iaf = frac_integral(f, FracIntegralParams(op.alpha), eval_level, window);
  const StepFunction prod = multiply(g, iaf);
  const double lhs = morrey_lorentz_norm(prod, MorreyLorentzParams(op.r0, op.r1, op.r2));
  const double rhs = weak_morrey_norm(g, op.q0, op.q1) *
                     morrey_lorentz_norm(f, MorreyLorentzParams(op.p0, op.p1, op.p2));
  if (lhs_out) *lhs_out = lhs;
  if (rhs_out) *rhs_out = rhs;
  return safe_ratio(lhs, rhs);
}

}  // namespace detail

/// Olsen ratio on one (f, g) pair; the product g . I_alpha f lives on the
/// I_alpha evaluation grid (g refined exactly, I_alpha f center-sampled),
/// and the report carries the ratio change under one grid refinement so the
/// quadrature sensitivity stays visible.
inline OlsenReport check_olsen(const StepFunction& f, const StepFunction& g,
                               const OlsenParams& op, int eval_level, int window_levels = 2) {
  op.validate();
  if (f.empty() || g.empty()) {
    OlsenReport rep;
    rep.eval_level = eval_level;
    if (!f.empty() || !g.empty())
      rep.rhs = 0.0;  // one factor vanishes; ratio stays 0
    return rep;
  }
  OlsenReport rep;
  rep.eval_level = eval_level;
  rep.ratio = detail::olsen_ratio(f, g, op, eval_level, window_levels, &rep.lhs, &rep.rhs);
  const double finer = detail::olsen_ratio(f, g, op, eval_level + 1, window_levels, nullptr, nullptr);
  rep.refinement_delta = rep.ratio == 0.0 ? 0.0 : std::fabs(finer / rep.ratio - 1.0);
  return rep;
}

/// Adams-type exponents: 1/s = 1/p - alpha/n with either
/// (1) s/p = t/q = u/r or (2) r = u = inf and s/p = t/q.
struct AdamsParams {
  double alpha = 0.5;
  double p = 1.5, q = 1.25, r = 1.25;
  double s = 6.0, t = 5.0, u = 5.0;
  int dim = 1;

  void validate() const {
    auto fail = [](const std::string& what) {
      throw std::domain_error("adams constraint violated: " + what);
    };
    const double n = dim;
    if (!(alpha > 0.0 && alpha < n)) fail("0 < alpha < n");
    if (!(1.0 < q && q <= p && !is_inf(p))) fail("1 < q <= p < inf");
    if (!(1.0 < t && t <= s && !is_inf(s))) fail("1 < t <= s < inf");
    if (std::fabs(1.0 / s - (1.0 / p - alpha / n)) > 1e-12) fail("1/s = 1/p - alpha/n");
    if (is_inf(r) || is_inf(u)) {
      if (!(is_inf(r) && is_inf(u))) fail("case 2 needs r = u = inf");
      if (std::fabs(s / p - t / q) > 1e-12) fail("s/p = t/q");
    } else {
      if (std::fabs(s / p - t / q) > 1e-12 || std::fabs(s / p - u / r) > 1e-12)
        fail("s/p = t/q = u/r");
    }
  }
};

inline RatioReport check_adams(const StepFunction& f, const AdamsParams& ap, int eval_level,
                               int window_levels = 2) {
  ap.validate();
  const StepFunction iaf = frac_integral(f, FracIntegralParams(ap.alpha), eval_level, window_levels);
  return make_ratio(morrey_lorentz_norm(iaf, MorreyLorentzParams(ap.s, ap.t, ap.u)),
                    morrey_lorentz_norm(f, MorreyLorentzParams(ap.p, ap.q, ap.r)));
}

/// Hardy-Littlewood-Sobolev baseline ||I_alpha f||_{L^s} / ||f||_{L^p} with
/// 1/s = 1/p - alpha/n.
inline RatioReport check_hls(const StepFunction& f, double alpha, double p, int eval_level,
                             int window_levels = 2) {
  const double n = f.dim;
  if (!(alpha > 0.0 && alpha < n)) throw std::domain_error("hls: 0 < alpha < n");
  const double inv_s = 1.0 / p - alpha / n;
  if (!(p > 1.0) || !(inv_s > 0.0))
    throw std::domain_error("hls: need 1 < p < s < inf with 1/s = 1/p - alpha/n");
  const double s = 1.0 / inv_s;
  const StepFunction iaf = frac_integral(f, FracIntegralParams(alpha), eval_level, window_levels);
  return make_ratio(lorentz_norm(iaf, LorentzParams(s, s)), lorentz_norm(f, LorentzParams(p, p)));
}

struct FeffermanPhongReport {
  double lhs = 0.0;    // int |u|^2 V
  double rhs = 0.0;    // ||V||_{WM^{n/2}_q} int |grad u|^2
  double ratio = 0.0;
  bool degenerate = false;  // grad u vanishes; hypothesis-violating input
};

/// Formal Fefferman-Phong ratio int |u|^2 V / (||V||_{WM^{n/2}_q} int
/// |grad u|^2). The inequality holds for n >= 3 only; at desk dimensions
/// this runs in report-only mode and is never asserted. The gradient is the
/// central finite difference of the cell samples of u.
inline FeffermanPhongReport check_fefferman_phong(const StepFunction& u, const StepFunction& V,
                                                  double q) {
  for (const auto& [k, v] : V.cells)
    if (v < 0.0) throw std::domain_error("fefferman-phong: V must be nonnegative");
  const double half_n = u.dim / 2.0;
  if (!(q > 0.0) || !(q <= half_n))
    throw std::domain_error("fefferman-phong: need 0 < q <= n/2");

  FeffermanPhongReport rep;
  const StepFunction u2V = multiply(multiply(u, u), V);
  rep.lhs = u2V.integral();

  const double h = std::ldexp(1.0, -u.level);
  std::set<CellIndex> stencil;
  for (const auto& [k, val] : u.cells) {
    stencil.insert(k);
    for (int ax = 0; ax < u.dim; ++ax) {
      CellIndex up = k, dn = k;
      up[ax] += 1;
      dn[ax] -= 1;
      stencil.insert(up);
      stencil.insert(dn);
    }
  }
  double grad2 = 0.0;
  for (const CellIndex& k : stencil) {
    for (int ax = 0; ax < u.dim; ++ax) {
      CellIndex up = k, dn = k;
      up[ax] += 1;
      dn[ax] -= 1;
      const double d = (u.at_cell(up) - u.at_cell(dn)) / (2.0 * h);
      grad2 += d * d * u.cell_measure();
    }
  }
  if (grad2 == 0.0) {
    rep.degenerate = true;
    rep.ratio = rep.lhs == 0.0 ? 0.0 : kInf;
    return rep;
  }
  rep.rhs = weak_morrey_norm(V, half_n, q) * grad2;
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  return rep;
}

}  // namespace mllab
