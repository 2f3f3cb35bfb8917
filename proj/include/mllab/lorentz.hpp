#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mllab/common.hpp"
#include "mllab/dyadic.hpp"

namespace mllab {

/// Exponents of L^{p,q}; p = inf is allowed only together with q = inf.
struct LorentzParams {
  double p = 1.0;
  double q = 1.0;

  LorentzParams() = default;
  LorentzParams(double p_, double q_) : p(p_), q(q_) { validate(); }

  void validate() const {
    if (!(p > 0.0) || !(q > 0.0)) throw std::domain_error("Lorentz exponents must be positive");
    if (is_inf(p) && !is_inf(q)) throw std::domain_error("p = inf requires q = inf");
  }
};

/// (q/r)^{1/r} with the r = inf convention that the factor is 1; this is the
/// constant in ||chi_E||_{L^{q,r}} = (q/r)^{1/r} |E|^{1/q}.
inline double indicator_lorentz_constant(double q, double r) {
  if (is_inf(r)) return 1.0;
  return std::pow(q / r, 1.0 / r);
}

/// Decreasing rearrangement of a step function: f*(t) = values[i] on
/// [cumulative[i-1], cumulative[i]), 0 past the end. Ties in |value| are
/// merged so `values` is strictly decreasing.
struct RearrangementProfile {
  std::vector<double> values;      // v_1 > v_2 > ... > v_K > 0
  std::vector<double> cumulative;  // 0 < T_1 < ... < T_K

  bool empty() const { return values.empty(); }
  double total_support() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  double value_at(double t) const {
    for (std::size_t i = 0; i < cumulative.size(); ++i)
      if (t < cumulative[i]) return values[i];
    return 0.0;
  }

  /// Distribution function recovered from the profile (exact).
  double distribution_at(double alpha) const {
    for (std::size_t i = values.size(); i-- > 0;)
      if (values[i] > alpha) return cumulative[i];
    return 0.0;
  }
};

/// Exact measure of {|f| > alpha}.
inline double distribution(const StepFunction& f, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("distribution: alpha must be positive");
  const double h = f.cell_measure();
  double m = 0.0;
  for (const auto& [k, v] : f.cells)
    if (std::fabs(v) > alpha) m += h;
  return m;
}

inline RearrangementProfile rearrangement(const StepFunction& f) {
  RearrangementProfile prof;
  if (f.empty()) return prof;
  std::vector<double> vals;
  vals.reserve(f.cells.size());
  for (const auto& [k, v] : f.cells) vals.push_back(std::fabs(v));
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  const double h = f.cell_measure();
  double t = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    t += h;
    if (i + 1 < vals.size() && vals[i + 1] == vals[i]) continue;  // merge ties
    prof.values.push_back(vals[i]);
    prof.cumulative.push_back(t);
  }
  return prof;
}

namespace detail {

// T2^c - T1^c, via expm1/log1p for nearby breakpoints where the direct
// difference cancels (t2 - t1 is exact there by Sterbenz).
inline double pow_diff(double t1, double t2, double c) {
  if (t1 == 0.0) return std::pow(t2, c);
  if (t2 / t1 < 1.01)
    return std::pow(t1, c) * std::expm1(c * std::log1p((t2 - t1) / t1));
  return std::pow(t2, c) - std::pow(t1, c);
}

}  // namespace detail

/// Closed-form Lorentz quasi-norm of a profile.
///   q < inf:  ( sum_i v_i^q (p/q) (T_i^{q/p} - T_{i-1}^{q/p}) )^{1/q}
///   q = inf:  max_i v_i T_i^{1/p}    (p = inf: max_i v_i)
inline double lorentz_norm(const RearrangementProfile& prof, const LorentzParams& lp) {
  lp.validate();
  if (prof.empty()) return 0.0;
  if (is_inf(lp.q)) {
    if (is_inf(lp.p)) return prof.values.front();
    double m = 0.0;
    for (std::size_t i = 0; i < prof.values.size(); ++i)
      m = std::fmax(m, prof.values[i] * std::pow(prof.cumulative[i], 1.0 / lp.p));
    return m;
  }
  const double c = lp.q / lp.p;
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < prof.values.size(); ++i) {
    acc += std::pow(prof.values[i], lp.q) * (lp.p / lp.q) *
           detail::pow_diff(prev, prof.cumulative[i], c);
    prev = prof.cumulative[i];
  }
  return std::pow(acc, 1.0 / lp.q);
}

inline double lorentz_norm(const StepFunction& f, const LorentzParams& lp) {
  return lorentz_norm(rearrangement(f), lp);
}

/// Weak norm sup_{t>0} t^{1/p} f*(t); equals lorentz_norm with q = inf.
inline double weak_norm(const StepFunction& f, double p) {
  if (!(p > 0.0)) throw std::domain_error("weak_norm: p must be positive");
  return lorentz_norm(f, LorentzParams(p, kInf));
}

struct HolderSplit {
  double p1 = 2.0, q1 = 2.0, p2 = 2.0, q2 = 2.0;
};

/// Ratio ||fg||_{L^{p,q}} / (||f||_{L^{p1,q1}} ||g||_{L^{p2,q2}}) with the
/// product exponents 1/p = 1/p1 + 1/p2 and 1/q = 1/q1 + 1/q2.
inline RatioReport check_holder(const StepFunction& f, const StepFunction& g,
                                const HolderSplit& s) {
  if (!(s.p1 > 0.0) || !(s.p2 > 0.0) || is_inf(s.p1) || is_inf(s.p2))
    throw std::domain_error("check_holder: p1, p2 must be finite positive");
  if (!(s.q1 > 0.0) || !(s.q2 > 0.0))
    throw std::domain_error("check_holder: q1, q2 must be positive");
  const double p = 1.0 / (1.0 / s.p1 + 1.0 / s.p2);
  const double inv_q = (is_inf(s.q1) ? 0.0 : 1.0 / s.q1) + (is_inf(s.q2) ? 0.0 : 1.0 / s.q2);
  const double q = inv_q == 0.0 ? kInf : 1.0 / inv_q;
  const double lhs = lorentz_norm(multiply(f, g), LorentzParams(p, q));
  const double rhs = lorentz_norm(f, LorentzParams(s.p1, s.q1)) *
                     lorentz_norm(g, LorentzParams(s.p2, s.q2));
  return make_ratio(lhs, rhs);
}

}  // namespace mllab
