#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "mllab/harness.hpp"

using namespace mllab;

TEST_CASE("generators are deterministic") {
  GenSpec gs;
  gs.span = 32;
  gs.support_cells = 17;
  gs.dist = ValueDist::heavy_tail;
  const StepFunction a = gen_step_function(42, gs);
  const StepFunction b = gen_step_function(42, gs);
  CHECK(a.cells == b.cells);
  const StepFunction c = gen_step_function(43, gs);
  CHECK(a.cells != c.cells);

  GenSpec single;
  single.support_cells = 1;
  CHECK(gen_step_function(1, single).cells.size() == 1);

  CHECK_THROWS_AS(gen_step_function(1, GenSpec{1, 4, 0}), std::invalid_argument);
}

TEST_CASE("heavy tails separate weak and strong norms") {
  GenSpec gs;
  gs.level = 8;
  gs.span = 1024;
  gs.support_cells = 1000;
  gs.dist = ValueDist::heavy_tail;
  gs.beta = 2.0;
  const StepFunction f = gen_step_function(7, gs);
  const double weak = weak_norm(f, 2.0);
  const double strong = lorentz_norm(f, LorentzParams(2.0, 2.0));
  CHECK(weak < strong);  // strict inclusion L^p in WL^p witnessed
}

TEST_CASE("atom family generator") {
  for (CubeLaw law : {CubeLaw::nested, CubeLaw::disjoint, CubeLaw::random_law}) {
    AtomGenSpec single;
    single.count = 1;
    single.law = law;
    const AtomFamily one = gen_atom_family(3, single);
    REQUIRE(one.atoms.size() == 1);
    CHECK(validate_atom(one.atoms[0], single.s, single.t, single.kind).pass);
  }

  AtomGenSpec as;
  as.count = 5;
  as.law = CubeLaw::nested;
  const AtomFamily fam = gen_atom_family(11, as);
  REQUIRE(fam.atoms.size() == 5);
  // nested law: each cube is the parent of the previous one
  for (std::size_t j = 1; j < fam.atoms.size(); ++j) {
    CHECK(fam.atoms[j].support_cube == fam.atoms[j - 1].support_cube.parent());
    CHECK(fam.atoms[j].support_cube.contains(fam.atoms[j - 1].support_cube));
  }
  for (const Atom& a : fam.atoms)
    CHECK(validate_atom(a, as.s, as.t, as.kind).pass);

  const AtomFamily fam2 = gen_atom_family(11, as);
  CHECK(fam2.coefficients == fam.coefficients);

  AtomGenSpec ks = as;
  ks.K = 1;
  for (const Atom& a : gen_atom_family(13, ks).atoms)
    CHECK(max_moment_residual(a.data, a.support_cube, 1) <= 1e-10);
}

TEST_CASE("trial spec hashing") {
  const TrialSpec a = default_spec("indicator");
  TrialSpec b = a;
  CHECK(a.content_hash() == b.content_hash());
  b.seed += 1;
  CHECK(a.content_hash() != b.content_hash());
  CHECK_THROWS_AS(default_spec("nope"), std::domain_error);
}

TEST_CASE("suite reruns yield byte-identical CSV") {
  FixtureStore store("/tmp/mllab_determinism_fixtures.json");
  TrialSpec spec = default_spec("indicator");
  spec.trials = 8;
  const VerifyReport a = run_suite(spec, RunMode::record_mode, store);
  const VerifyReport b = run_suite(spec, RunMode::record_mode, store);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.passed);
  CHECK(!a.rows.empty());
  CHECK(std::string(VerifyReport::kCsvHeader) ==
        "suite,trial,seed,dim,params,lhs,rhs,ratio,eval_level,notes");
}

TEST_CASE("record then assert round-trips; input drift is refused") {
  const std::string path = "/tmp/mllab_test_fixtures_roundtrip.json";
  std::remove(path.c_str());
  FixtureStore store(path);

  TrialSpec spec = default_spec("holder");
  spec.trials = 12;

  // assert before record: fixture missing is a loud error
  CHECK_THROWS_AS(run_suite(spec, RunMode::assert_mode, store), std::runtime_error);

  const VerifyReport rec = run_suite(spec, RunMode::record_mode, store);
  CHECK(rec.passed);

  FixtureStore reloaded(path);
  CHECK(reloaded.has("holder.max"));
  const VerifyReport ok = run_suite(spec, RunMode::assert_mode, reloaded);
  CHECK(ok.passed);

  // different seed: content hash differs, assertion refuses the fixture
  TrialSpec drift = spec;
  drift.seed = 999;
  const VerifyReport bad = run_suite(drift, RunMode::assert_mode, reloaded);
  CHECK_FALSE(bad.passed);
  CHECK(bad.failure.find("hash") != std::string::npos);

  std::remove(path.c_str());
}

TEST_CASE("unknown suite is rejected") {
  FixtureStore store("/tmp/mllab_unknown_fixtures.json");
  TrialSpec spec;
  spec.suite = "no-such-suite";
  spec.trials = 1;
  CHECK_THROWS_AS(run_suite(spec, RunMode::assert_mode, store), std::domain_error);
}

TEST_CASE("report-only suite never asserts fixtures") {
  FixtureStore store("/tmp/mllab_fp_fixtures.json");
  TrialSpec spec = default_spec("fefferman-phong");
  spec.trials = 3;
  const VerifyReport rep = run_suite(spec, RunMode::assert_mode, store);
  CHECK(rep.passed);  // no fixtures involved
  for (const VerifyRow& r : rep.rows)
    CHECK(r.notes.find("report-only") != std::string::npos);
}
