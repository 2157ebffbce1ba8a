#include <doctest.h>

#include "momt/error.hpp"
#include "momt/io.hpp"
#include "momt/scenarios.hpp"

using namespace momt;
using namespace momt::scenarios;

namespace {

ScenarioConfig config(ScenarioKind kind, std::uint64_t seed) {
  ScenarioConfig c;
  c.kind = kind;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("scenarios") {
  TEST_CASE("sphere reflection, seed 1") {
    const auto r = run(config(ScenarioKind::kSphereReflection, 1));
    CHECK(r.pass);
    CHECK(r.report["checks"]["diagonal_support"]["pass"] == true);
    CHECK(r.report["checks"]["reflected_plan"]["distinct"] == true);
    CHECK(r.report["checks"]["mixture_plan"]["mixture_max_fiber"] == 2);
    CHECK(r.report["checks"]["uniqueness"]["status"] == "non-unique");
    CHECK(r.report["checks"]["uniqueness"]["witness_is_reflection"] == true);
    CHECK(r.report["checks"]["reconstruction"]["y_map_is_identity"] == true);
  }

  TEST_CASE("sphere generator") {
    ScenarioConfig c = config(ScenarioKind::kSphereReflection, 4);
    c.mirror_pairs = 3;
    c.equator_points = 2;
    const auto g = gen_sphere_reflection(c);
    CHECK(g.instance.arities() == std::vector<int>{8, 8, 8});
    for (int z = 0; z < 8; ++z) {
      const auto& p = g.instance.marginal(2).space.points[z];
      const auto& q = g.instance.marginal(2).space.points[g.reflection[z]];
      CHECK(p[2] == doctest::Approx(-q[2]));
      CHECK(g.reflection[g.reflection[z]] == z);
    }
    CHECK(run(c).pass);
  }

  TEST_CASE("nested shells") {
    CHECK(run(config(ScenarioKind::kNestedShells, 1)).pass);
    ScenarioConfig c = config(ScenarioKind::kNestedShells, 2);
    c.shell_radii = {0.6, 1.0, 1.4};
    const auto r = run(c);
    CHECK(r.pass);
    const auto g = gen_nested_shells(c);
    for (std::size_t z = 0; z < g.normals.size(); ++z) {
      double norm = 0.0;
      for (double v : g.normals[z]) norm += v * v;
      CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
    ScenarioConfig bad = c;
    bad.shell_radii = {1.0, 0.5};
    CHECK_THROWS_AS(resolve(bad), Error);
    bad = c;
    bad.normal = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(resolve(bad), Error);
  }

  TEST_CASE("Gangbo-Swiech, n 8, d 2, seed 42") {
    ScenarioConfig c = config(ScenarioKind::kGangboSwiech, 42);
    c.n = 8;
    c.dimension = 2;
    const auto r = run(c);
    CHECK(r.pass);
    CHECK(r.report["checks"]["t_maps"]["agreement_fraction"] == 1.0);
    c.marginals = 2;
    CHECK_THROWS_AS(resolve(c), Error);
  }

  TEST_CASE("Monge with quadratic terms") {
    const auto r = run(config(ScenarioKind::kMongeQuadratic, 3));
    CHECK(r.pass);
    CHECK(r.report["hypothesis_violation"] == false);
    ScenarioConfig t = config(ScenarioKind::kMongeQuadratic, 3);
    t.touching = true;
    const auto flagged = run(t);
    CHECK(flagged.report["hypothesis_violation"] == true);
    CHECK(flagged.report["checks"]["plan_graph"]["asserted"] == false);
  }

  TEST_CASE("Gromov-Wasserstein") {
    ScenarioConfig c = config(ScenarioKind::kGromovWasserstein, 2);
    c.twist_trials = 20;
    const auto r = run(c);
    CHECK(r.pass);
    CHECK(r.report["checks"]["twist_count"]["max_count"].get<int>() <= 2);
  }

  TEST_CASE("two-map demo") {
    const auto open = run(config(ScenarioKind::kTwoMapDemo, 1));
    CHECK(open.pass);
    CHECK(open.report["checks"]["uniqueness"]["status"] == "non-unique");

    ScenarioConfig c = config(ScenarioKind::kTwoMapDemo, 1);
    c.n = 3;
    c.alpha = {1.0, 0.0, 0.5};
    c.beta = {0.3, 0.6, 1.0};
    const auto closed = run(c);
    CHECK(closed.pass);
    CHECK(closed.report["checks"]["uniqueness"]["unique_condition"] == true);
    CHECK(closed.report["checks"]["uniqueness"]["status"] == "unique");
  }

  TEST_CASE("reports are deterministic") {
    for (auto kind : {ScenarioKind::kSphereReflection, ScenarioKind::kNestedShells, ScenarioKind::kGangboSwiech,
                      ScenarioKind::kMongeQuadratic, ScenarioKind::kTwoMapDemo}) {
      const auto a = run(config(kind, 7));
      const auto b = run(config(kind, 7));
      CHECK(io::dump(a.report) == io::dump(b.report));
      REQUIRE(a.tables.size() == b.tables.size());
      for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].render() == b.tables[i].render());
    }
  }

  TEST_CASE("kind names") {
    CHECK(kind_from_name("gs") == ScenarioKind::kGangboSwiech);
    CHECK(kind_from_name("nestedShells") == ScenarioKind::kNestedShells);
    CHECK_THROWS_AS(kind_from_name("spiral"), Error);
    CsvTable t{"t", {"a", "b"}, {{"1", "2"}}};
    CHECK(t.render() == "a,b\n1,2\n");
  }
}
