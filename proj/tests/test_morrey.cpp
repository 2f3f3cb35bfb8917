#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mllab/harness.hpp"
#include "mllab/morrey.hpp"
#include "oracles.hpp"

using namespace mllab;

TEST_CASE("indicator norm closed form, randomized") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = trial % 2 ? 2 : 1;
    const double q = rng.uniform(0.5, 3.0);
    const double p = q + rng.uniform(0.0, 2.0);
    const double r = rng.coin() ? rng.uniform(0.5, 4.0) : kInf;
    const DyadicCube cube(dim, static_cast<int>(rng.uniform_int(-2, 4)),
                          {rng.uniform_int(-10, 10), dim == 2 ? rng.uniform_int(-10, 10) : 0});
    StepFunction chi(dim, cube.level);
    chi.set(cube.index, 1.0);
    const double got = morrey_lorentz_norm(chi, MorreyLorentzParams(p, q, r));
    const double want = indicator_lorentz_constant(q, r) * std::pow(cube.volume(), 1.0 / p);
    CHECK(rel_err(got, want) <= 1e-12);
  }
}

TEST_CASE("chi_[0,2) at (4,2,2) is 2^{1/4}") {
  StepFunction chi(1, -1);
  chi.set({0, 0}, 1.0);
  CHECK(morrey_lorentz_norm(chi, MorreyLorentzParams(4, 2, 2)) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
}

TEST_CASE("two-step example and brute-force cross-checks") {
  StepFunction f(1, 0);
  f.set({0, 0}, 2.0).set({1, 0}, 1.0);
  const MorreyLorentzParams mp(2, 1, 1);
  const double got = morrey_lorentz_norm(f, mp);
  // max over the finite family is attained on [0,2): 2^{-1/2} * 3
  CHECK(got == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(rel_err(got, oracles::morrey_bruteforce(f, 2, 1, 1)) <= 1e-13);
  CHECK(rel_err(got, morrey_lorentz_norm(refine(f, 1), mp)) <= 1e-13);
}

TEST_CASE("brute force over random functions") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GenSpec gs;
    gs.dim = seed % 3 == 0 ? 2 : 1;
    gs.level = 3;
    gs.span = 8;
    gs.support_cells = 1 + static_cast<int>(Rng(seed).uniform_int(0, 6));
    const StepFunction f = gen_step_function(Rng::derive(31, seed), gs);
    for (auto [p, q, r] : {std::tuple{2.0, 1.0, 1.0}, {2.0, 1.5, kInf}, {3.0, 1.5, 2.0}}) {
      const double got = morrey_lorentz_norm(f, MorreyLorentzParams(p, q, r));
      CHECK(rel_err(got, oracles::morrey_bruteforce(f, p, q, r)) <= 1e-12);
    }
  }
}

TEST_CASE("specialization M^p_{p,r} = L^{p,r} for compact support") {
  StepFunction chi(1, 0);
  chi.set({0, 0}, 1.0);
  CHECK(morrey_lorentz_norm(chi, MorreyLorentzParams(1, 1, 1)) == doctest::Approx(1.0));
  for (std::uint64_t seed = 3; seed < 13; ++seed) {
    GenSpec gs;
    gs.support_cells = 9;
    const StepFunction f = gen_step_function(seed, gs);
    for (auto [p, r] : {std::pair{2.0, 1.0}, {1.5, kInf}}) {
      CHECK(rel_err(morrey_lorentz_norm(f, MorreyLorentzParams(p, p, r)),
                    lorentz_norm(f, LorentzParams(p, r))) <= 1e-13);
    }
  }
}

TEST_CASE("weak Morrey norm and its threshold cross-evaluation") {
  StepFunction chi(1, -2);
  chi.set({1, 0}, 1.0);  // [4,8), |Q| = 4
  for (double p : {2.0, 3.0})
    CHECK(rel_err(weak_morrey_norm(chi, p, 1.5), std::pow(4.0, 1.0 / p)) <= 1e-13);

  for (std::uint64_t seed = 50; seed < 70; ++seed) {
    GenSpec gs;
    gs.support_cells = 10;
    gs.dist = seed % 2 ? ValueDist::uniform : ValueDist::indicator_mix;
    const StepFunction f = gen_step_function(seed, gs);
    const double a = weak_morrey_norm(f, 2.0, 1.0);
    const double b = weak_morrey_norm_via_thresholds(f, 2.0, 1.0);
    CHECK(rel_err(a, b) <= 1e-12);
    // weak norm never exceeds the strong one (constant 1 at r = 1)
    CHECK(a <= morrey_lorentz_norm(f, MorreyLorentzParams(2.0, 1.0, 1.0)) * (1 + 1e-12));
  }
}

TEST_CASE("embedding checks") {
  StepFunction f(1, 2);
  f.set({0, 0}, 1.0).set({3, 0}, -2.0).set({9, 0}, 0.25);

  // identity embedding
  const MorreyLorentzParams a(2, 1.5, 2);
  CHECK(check_embedding(f, a, a).ratio == doctest::Approx(1.0));

  // indicator closed-form ratio in case (1)
  StepFunction chi(1, 1);
  chi.set({5, 0}, 1.0);
  const MorreyLorentzParams a1(2, 1.5, 1), b1(2, 1.5, 3);
  const double want = indicator_lorentz_constant(1.5, 3) / indicator_lorentz_constant(1.5, 1);
  CHECK(rel_err(check_embedding(chi, a1, b1).ratio, want) <= 1e-12);

  // weak embedding has constant 1 at (2,1,1) -> (2,1,inf)
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    GenSpec gs;
    gs.support_cells = 1 + static_cast<int>(Rng(seed).uniform_int(0, 11));
    gs.dist = seed % 3 == 0 ? ValueDist::heavy_tail : ValueDist::uniform;
    const StepFunction g = gen_step_function(Rng::derive(7, seed), gs);
    const RatioReport rep =
        check_embedding(g, MorreyLorentzParams(2, 1, 1), MorreyLorentzParams(2, 1, kInf));
    CHECK(rep.ratio <= 1.0 + 1e-10);
  }

  // mismatched pair is rejected
  CHECK_THROWS_AS(
      check_embedding(f, MorreyLorentzParams(2, 1, 1), MorreyLorentzParams(3, 1, 1)),
      std::domain_error);
  CHECK_THROWS_AS(
      check_embedding(f, MorreyLorentzParams(2, 1, 2), MorreyLorentzParams(2, 1.5, 1)),
      std::domain_error);
}

TEST_CASE("Fatou surrogate") {
  StepFunction f(1, 1);
  f.set({0, 0}, 1.0).set({1, 0}, 0.5);
  const MorreyLorentzParams mp(2, 1, 1);

  std::vector<StepFunction> constant(6, f);
  const FatouReport c = check_fatou(constant, f, mp);
  CHECK(c.holds);
  CHECK(c.limit_norm == doctest::Approx(c.liminf));

  std::vector<StepFunction> above;
  for (int j = 1; j <= 8; ++j) above.push_back(scale(f, 1.0 + 1.0 / j));
  CHECK(check_fatou(above, f, mp).holds);

  CHECK_THROWS_AS(check_fatou({}, f, mp), std::domain_error);
  CHECK_THROWS_AS(check_fatou(std::vector<StepFunction>(3, f), f, mp), std::domain_error);

  // increasing truncations: norms increase monotonically to the limit
  StepFunction big(1, 2);
  for (int i = 0; i < 8; ++i) big.set({i, 0}, 1.0 + i * 0.25);
  std::vector<std::pair<CellIndex, double>> cells(big.cells.begin(), big.cells.end());
  double prev = 0.0;
  for (std::size_t n = 1; n <= cells.size(); ++n) {
    StepFunction partial(1, 2);
    for (std::size_t i = 0; i < n; ++i) partial.set(cells[i].first, cells[i].second);
    const double nn = morrey_lorentz_norm(partial, mp);
    CHECK(nn >= prev - 1e-13);
    prev = nn;
  }
  CHECK(prev == doctest::Approx(morrey_lorentz_norm(big, mp)));
}

TEST_CASE("cube-sup is invariant under enumeration order") {
  GenSpec gs;
  gs.support_cells = 12;
  const StepFunction f = gen_step_function(911, gs);
  const MorreyLorentzParams mp(2, 1.5, 1);
  auto family = enumerate_cubes(f);
  const LorentzParams lq(mp.q, mp.r);
  double fwd = 0.0, rev = 0.0;
  for (const DyadicCube& q : family)
    fwd = std::fmax(fwd, std::pow(q.volume(), 1.0 / mp.p - 1.0 / mp.q) *
                             lorentz_norm(restrict_to(f, q), lq));
  std::reverse(family.begin(), family.end());
  for (const DyadicCube& q : family)
    rev = std::fmax(rev, std::pow(q.volume(), 1.0 / mp.p - 1.0 / mp.q) *
                             lorentz_norm(restrict_to(f, q), lq));
  CHECK(fwd == rev);
  CHECK(fwd == morrey_lorentz_norm(f, mp));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MorreyLorentzParams(1.0, 2.0, 1.0), std::domain_error);  // q > p
  CHECK_THROWS_AS(MorreyLorentzParams(kInf, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(MorreyLorentzParams(2.0, 1.0, 0.0), std::domain_error);
  CHECK_NOTHROW(MorreyLorentzParams(2.0, 1.0, kInf));
}
