#pragma once

#include <algorithm>
#include <vector>

#include "mllab/common.hpp"
#include "mllab/dyadic.hpp"
#include "mllab/lorentz.hpp"

namespace mllab {

/// Exponents of M^p_{q,r}: 0 < q <= p < inf, 0 < r <= inf (r = inf is the
/// weak variant).
struct MorreyLorentzParams {
  double p = 1.0;
  double q = 1.0;
  double r = 1.0;

  MorreyLorentzParams() = default;
  MorreyLorentzParams(double p_, double q_, double r_) : p(p_), q(q_), r(r_) { validate(); }

  void validate() const {
    if (!(q > 0.0) || !(p > 0.0) || is_inf(p) || !(q <= p))
      throw std::domain_error("Morrey-Lorentz exponents require 0 < q <= p < inf");
    if (!(r > 0.0)) throw std::domain_error("Morrey-Lorentz exponent r must be positive");
  }
};

/// Dyadic Morrey-Lorentz quasi-norm:
///   max over enumerate_cubes(f) of |Q|^{1/p-1/q} ||f chi_Q||_{L^{q,r}}.
/// Exact for step functions by the finite-family argument in dyadic.hpp.
/// The sup over all axis-parallel cubes is equivalent with an unquantified
/// constant; only the dyadic form is computed here.
inline double morrey_lorentz_norm(const StepFunction& f, const MorreyLorentzParams& mp) {
  mp.validate();
  if (f.empty()) return 0.0;
  const LorentzParams lq(mp.q, mp.r);
  const double e = 1.0 / mp.p - 1.0 / mp.q;
  double best = 0.0;
  for (const DyadicCube& cube : enumerate_cubes(f)) {
    const double local = lorentz_norm(restrict_to(f, cube), lq);
    best = std::fmax(best, std::pow(cube.volume(), e) * local);
  }
  return best;
}

/// Weak Morrey quasi-norm, the r = inf column of the scale.
inline double weak_morrey_norm(const StepFunction& f, double p, double q) {
  if (!(0.0 < q && q <= p) || is_inf(p))
    throw std::domain_error("weak Morrey requires 0 < q <= p < inf");
  return morrey_lorentz_norm(f, MorreyLorentzParams(p, q, kInf));
}

/// Cross-evaluation of the weak Morrey norm via the level-set formula
/// sup_lambda lambda ||chi_{|f|>lambda}||_{M^p_q}; the sup is attained as
/// lambda approaches a value threshold from below, i.e. on the superlevel
/// sets {|f| >= v_i}.
inline double weak_morrey_norm_via_thresholds(const StepFunction& f, double p, double q) {
  if (!(0.0 < q && q <= p) || is_inf(p))
    throw std::domain_error("weak Morrey requires 0 < q <= p < inf");
  if (f.empty()) return 0.0;
  std::vector<double> thresholds;
  for (const auto& [k, v] : f.cells) thresholds.push_back(std::fabs(v));
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const MorreyLorentzParams ind(p, q, q);
  double best = 0.0;
  for (double v : thresholds) {
    StepFunction chi(f.dim, f.level);
    for (const auto& [k, val] : f.cells)
      if (std::fabs(val) >= v) chi.cells[k] = 1.0;
    best = std::fmax(best, v * morrey_lorentz_norm(chi, ind));
  }
  return best;
}

/// Embedding check for the two cases of the Ragusa embeddings:
///   (1) same (p,q), r1 <= r2:        M^p_{q,r1} -> M^p_{q,r2}
///   (2) same p, q2 < q1, any r1,r2:  M^p_{q1,r1} -> M^p_{q2,r2}
/// Returns ||f||_b / ||f||_a; the constants are not quantified, suites
/// record the empirical max.
inline RatioReport check_embedding(const StepFunction& f, const MorreyLorentzParams& a,
                                   const MorreyLorentzParams& b) {
  a.validate();
  b.validate();
  const bool case1 = a.p == b.p && a.q == b.q && a.r <= b.r;
  const bool case2 = a.p == b.p && b.q < a.q;
  if (!case1 && !case2)
    throw std::domain_error("check_embedding: parameter pair fits neither embedding case");
  return make_ratio(morrey_lorentz_norm(f, b), morrey_lorentz_norm(f, a));
}

struct FatouReport {
  double limit_norm = 0.0;
  double liminf = 0.0;
  bool holds = false;
};

/// Fatou property check: ||limit|| <= liminf ||f_j||, with liminf realized
/// as the min over the last five provided elements. The surrogate is exact
/// when the supplied tail has stabilized or approaches the limit from
/// above; from-below tails undershoot the true liminf by their remaining
/// gap, which callers must account for.
inline FatouReport check_fatou(const std::vector<StepFunction>& sequence,
                               const StepFunction& limit, const MorreyLorentzParams& mp) {
  if (sequence.empty()) throw std::domain_error("check_fatou: empty sequence");
  if (sequence.size() < 5) throw std::domain_error("check_fatou: need a tail of length >= 5");
  FatouReport rep;
  rep.limit_norm = morrey_lorentz_norm(limit, mp);
  rep.liminf = kInf;
  for (std::size_t i = sequence.size() - 5; i < sequence.size(); ++i)
    rep.liminf = std::fmin(rep.liminf, morrey_lorentz_norm(sequence[i], mp));
  rep.holds = rep.limit_norm <= rep.liminf + 1e-12;
  return rep;
}

}  // namespace mllab
