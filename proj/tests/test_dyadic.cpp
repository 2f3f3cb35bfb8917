#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mllab/dyadic.hpp"
#include "mllab/io.hpp"
#include "mllab/lorentz.hpp"
#include "mllab/morrey.hpp"
#include "mllab/rng.hpp"

using namespace mllab;

TEST_CASE("cube geometry") {
  DyadicCube q(1, 2, {5, 0});
  CHECK(q.side() == 0.25);
  CHECK(q.volume() == 0.25);
  CHECK(q.low(0) == 1.25);
  CHECK(q.parent() == DyadicCube(1, 1, {2, 0}));
  CHECK(q.parent().contains(q));

  DyadicCube r(2, -1, {-1, 0});
  CHECK(r.volume() == 4.0);
  CHECK(r.parent().contains(r));
  CHECK(r.parent() == DyadicCube(2, -2, {-1, 0}));
}

TEST_CASE("measure additivity over children is exact") {
  for (int dim : {1, 2})
    for (int lv : {-3, 0, 4}) {
      DyadicCube q(dim, lv, {dim == 1 ? 7 : -3, dim == 2 ? 5 : 0});
      double child_sum = 0.0;
      for (const DyadicCube& c : q.children()) {
        child_sum += c.volume();
        CHECK(q.contains(c));
      }
      CHECK(child_sum == q.volume());
    }
}

TEST_CASE("nesting trichotomy on random pairs") {
  Rng rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = trial % 2 ? 2 : 1;
    DyadicCube a(dim, static_cast<int>(rng.uniform_int(-6, 6)),
                 {rng.uniform_int(-20, 20), dim == 2 ? rng.uniform_int(-20, 20) : 0});
    DyadicCube b(dim, static_cast<int>(rng.uniform_int(-6, 6)),
                 {rng.uniform_int(-20, 20), dim == 2 ? rng.uniform_int(-20, 20) : 0});
    const bool ab = a.contains(b), ba = b.contains(a);
    if (a == b) {
      CHECK(ab);
      CHECK(ba);
      continue;
    }
    const int nested = (ab ? 1 : 0) + (ba ? 1 : 0);
    CHECK(nested <= 1);
    CHECK(disjoint(a, b) == (nested == 0));
  }
}

TEST_CASE("refine is the pointwise identity") {
  StepFunction chi(1, 0);
  chi.set({0, 0}, 1.0);
  const StepFunction fine = refine(chi, 1);
  CHECK(fine.cells.size() == 2);
  CHECK(fine.at_cell({0, 0}) == 1.0);
  CHECK(fine.at_cell({1, 0}) == 1.0);
  CHECK(fine.value_at({0.7, 0.0}) == 1.0);

  CHECK_THROWS_AS(refine(fine, 0), std::domain_error);

  const StepFunction zero(1, 3);
  CHECK(refine(zero, 5).empty());
}

TEST_CASE("refine preserves norms") {
  StepFunction f(1, 1);
  f.set({0, 0}, 2.0).set({1, 0}, -1.0).set({5, 0}, 0.5);
  const StepFunction g = refine(f, 4);
  for (auto [p, q] : {std::pair{2.0, 1.0}, {1.5, 3.0}, {2.0, kInf}}) {
    const double a = lorentz_norm(f, LorentzParams(p, q));
    const double b = lorentz_norm(g, LorentzParams(p, q));
    CHECK(rel_err(a, b) <= 1e-13);
  }
  const MorreyLorentzParams mp(2.0, 1.5, 1.0);
  CHECK(rel_err(morrey_lorentz_norm(f, mp), morrey_lorentz_norm(g, mp)) <= 1e-13);
}

TEST_CASE("domain_box and enumerate_cubes") {
  StepFunction chi(1, 0);
  chi.set({0, 0}, 1.0);
  CHECK(chi.domain_box() == DyadicCube(1, 0, {0, 0}));
  const auto family = enumerate_cubes(chi);
  REQUIRE(family.size() == 2);
  CHECK(family[0] == DyadicCube(1, -1, {0, 0}));  // [0,2)
  CHECK(family[1] == DyadicCube(1, 0, {0, 0}));   // the cell itself

  StepFunction two(1, 0);
  two.set({0, 0}, 1.0).set({2, 0}, 1.0);  // [0,1) and [2,3)
  CHECK(two.domain_box() == DyadicCube(1, -2, {0, 0}));  // [0,4)
  bool has_04 = false;
  for (const DyadicCube& q : enumerate_cubes(two)) {
    if (q == DyadicCube(1, -2, {0, 0})) has_04 = true;
    // every cube intersects the support
    bool meets = false;
    for (const auto& [k, v] : two.cells)
      if (q.contains(DyadicCube(1, 0, k))) meets = true;
    CHECK(meets);
  }
  CHECK(has_04);
}

TEST_CASE("straddling support has no dyadic hull") {
  StepFunction f(1, 0);
  f.set({-1, 0}, 1.0).set({0, 0}, 1.0);
  CHECK_THROWS_AS(f.domain_box(), std::domain_error);
  StepFunction neg(1, 0);
  neg.set({-4, 0}, 1.0).set({-1, 0}, 2.0);
  CHECK(neg.domain_box() == DyadicCube(1, -2, {-1, 0}));  // [-4,0)
}

TEST_CASE("grid index set measure") {
  GridIndexSet s;
  s.dim = 2;
  s.level = 3;
  s.cells = {{0, 0}, {1, 5}, {7, 7}};
  CHECK(s.measure() == 3.0 * std::ldexp(1.0, -6));
}

TEST_CASE("step function JSON round trip") {
  StepFunction f(2, 1);
  f.set({0, 1}, 2.5).set({-3, 2}, -1.0);
  const json j = step_function_to_json(f);
  const StepFunction g = step_function_from_json(j);
  CHECK(g.dim == 2);
  CHECK(g.level == 1);
  CHECK(g.cells == f.cells);
}

TEST_CASE("JSON rejects duplicates and bad shapes") {
  json dup = json::parse(R"({"dim":1,"level":0,"cells":[
    {"index":[0],"value":1.0},{"index":[0],"value":2.0}]})");
  CHECK_THROWS_AS(step_function_from_json(dup), std::invalid_argument);

  json short_idx = json::parse(R"({"dim":2,"level":0,"cells":[{"index":[0],"value":1.0}]})");
  CHECK_THROWS_AS(step_function_from_json(short_idx), std::invalid_argument);

  auto parse_garbage = [] {
    const json j = json::parse("{not json");
    return j.is_object();
  };
  CHECK_THROWS(parse_garbage());
}

TEST_CASE("dilate relabels levels") {
  StepFunction f(1, 0);
  f.set({0, 0}, 1.0).set({3, 0}, 2.0);
  const StepFunction g = dilate(f, 2);
  CHECK(g.level == 2);
  CHECK(g.cells == f.cells);
  CHECK(g.value_at({0.1, 0.0}) == 1.0);
}
