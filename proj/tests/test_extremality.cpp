#include <doctest.h>

#include <cmath>
#include <random>

#include "momt/error.hpp"
#include "momt/extremality.hpp"
#include "momt/lp.hpp"
#include "support.hpp"

using namespace momt;
using namespace momt::extremality;

namespace {

costs::CostTensor table(std::vector<int> arities, std::vector<double> values) {
  return costs::CostTensor{Grid(std::move(arities)), std::move(values)};
}

}  // namespace

TEST_SUITE("extremality") {
  TEST_CASE("optimal supports are cyclically monotone") {
    for (int seed = 1; seed <= 10; ++seed) {
      for (Sense sense : {Sense::kMin, Sense::kMax}) {
        const auto inst = testing::random_instance(seed, {4, 3, 4}, sense);
        const auto sol = lp::solve(inst);
        const auto r = check_cyclical_monotonicity(sol.plan.support(), inst.table(), sense, 3, 50, seed);
        CHECK(r.pass);
        CHECK(r.cycles_checked > 0);
      }
    }
  }

  TEST_CASE("anti-optimal 2x2 support violates monotonicity") {
    // c(x, y) = x y on {0, 1}^2, minimized: the diagonal costs 1, the swap 0.
    const auto c = table({2, 2}, {0, 0, 0, 1});
    const auto r = check_cyclical_monotonicity({{0, 0}, {1, 1}}, c, Sense::kMin);
    REQUIRE_FALSE(r.pass);
    REQUIRE(r.violation.has_value());
    CHECK(r.violation->original == doctest::Approx(1.0));
    CHECK(r.violation->permuted == doctest::Approx(0.0));
    CHECK(check_cyclical_monotonicity({{0, 1}}, c, Sense::kMin).pass);
  }

  TEST_CASE("fiber report") {
    const auto c = table({2, 3}, {0, 5, 2, 1, 1, 1});
    const auto graph = fiber_report({{0, 1}, {1, 2}}, c, {0});
    for (const auto& e : graph.atoms) CHECK(e.fiber == e.argmax);
    CHECK(graph.max_fiber() == 1);

    const auto two = fiber_report({{0, 1}, {0, 2}}, c, {0});
    REQUIRE(two.atoms.size() == 1);
    CHECK(two.atoms[0].fiber.size() == 2);
    CHECK(two.atoms[0].argmax == std::vector<MultiIndex>{{1}});

    // Partition {2} before {0, 1}: the block containing y=2 wins over a larger value.
    OrderedPartition p{{{{2}}, {{0}, {1}}}};
    const auto part = fiber_report({{0, 1}, {0, 2}}, c, {0}, p);
    CHECK(part.atoms[0].block == 0);
    CHECK(part.atoms[0].argmax == std::vector<MultiIndex>{{2}});
  }

  TEST_CASE("c-extreme check") {
    // x1 -> {a, b}, x2 -> {a, c}; argmaxes b and c leave a shared.
    const auto c = table({2, 3}, {0, 1, 0, 0, 0, 1});
    const auto r = check_c_extreme(fiber_report({{0, 0}, {0, 1}, {1, 0}, {1, 2}}, c, {0}));
    REQUIRE_FALSE(r.pass);
    CHECK(r.violation->shared == MultiIndex{0});
    CHECK(check_c_extreme(fiber_report({{0, 1}, {1, 0}}, c, {0})).pass);
  }

  TEST_CASE("map decomposition") {
    const std::vector<double> mu = {0.25, 0.75};
    const auto g = detect_map_decomposition(graph_coupling(mu, {1, 0}, 2), 0);
    CHECK(g.max_fiber == 1);
    CHECK(g.decomposition.maps.size() == 1);
    CHECK(g.decomposition.weights[0] == std::vector<double>{1.0, 1.0});

    Coupling mix({2, 3});
    const Coupling g1 = graph_coupling(mu, {0, 1}, 3), g2 = graph_coupling(mu, {2, 2}, 3);
    for (const auto& [i, m] : g1.entries()) mix.add(i, 0.5 * m);
    for (const auto& [i, m] : g2.entries()) mix.add(i, 0.5 * m);
    const auto d = detect_map_decomposition(mix, 0);
    CHECK(d.max_fiber == 2);
    for (const auto& w : d.decomposition.weights) {
      for (double v : w) CHECK(v == doctest::Approx(0.5));
    }
    CHECK(max_abs_difference(recombine(d.decomposition, mu, {2, 3}), mix) <= 1e-12);
    CHECK_FALSE(detect_map_decomposition(mix, 0, 1).decomposable);

    for (int seed = 1; seed <= 5; ++seed) {
      const auto inst = testing::random_instance(seed, {3, 4, 2}, Sense::kMin);
      const auto plan = lp::solve(inst).plan;
      for (int axis = 0; axis < 3; ++axis) {
        const auto dd = detect_map_decomposition(plan, axis);
        CHECK(max_abs_difference(recombine(dd.decomposition, inst.marginal(axis).weights, plan.arities()), plan) <= 1e-12);
      }
    }
  }

  TEST_CASE("singleton fibers give vertices") {
    for (int seed = 1; seed <= 20; ++seed) {
      const auto inst = testing::random_instance(seed, {4, 4}, Sense::kMin, true);
      const auto plan = lp::solve(inst).plan;
      if (detect_map_decomposition(plan, 0).max_fiber == 1) CHECK(lp::is_vertex(plan, inst.weights()));
    }
  }

  TEST_CASE("c-extreme minimizing sets carry a unique optimal plan") {
    int extreme = 0;
    for (int seed = 1; seed <= 60; ++seed) {
      const std::vector<int> shape = seed % 3 == 0 ? std::vector<int>{2, 2, 3} : std::vector<int>{3, 4};
      const auto inst = testing::random_instance(1000 + seed, shape, seed % 2 ? Sense::kMin : Sense::kMax, seed % 4 == 0);
      const auto sol = lp::solve(inst);
      const auto gamma = lp::minimizing_set(inst, sol.potentials);
      if (!check_c_extreme(fiber_report(gamma.indices, inst.table(), {0})).pass) continue;
      ++extreme;
      const auto cert = lp::uniqueness_certificate(inst, sol.plan, sol.value);
      CAPTURE(seed);
      CHECK(cert.status == lp::UniquenessStatus::kUnique);
    }
    CHECK(extreme >= 10);
  }

  TEST_CASE("Gromov-Wasserstein twist") {
    const std::vector<std::vector<double>> a = {{1.0, 0.3}, {-0.2, 0.8}};
    const Point y0 = {0.4, -0.7};
    std::vector<Point> ring;
    const double r = std::sqrt(costs::squared_norm(y0));
    for (int k = 0; k < 360; ++k) ring.push_back({r * std::cos(k * M_PI / 180), r * std::sin(k * M_PI / 180)});
    ring.push_back(y0);
    CHECK(gw_twist_count({0.0, 0.0}, y0, a, 1.5, ring) == 1);
    CHECK(gw_twist_count({0.3, 0.1}, y0, a, 1.5, {y0}) == 1);

    const auto sols = gw_twist_solutions({0.3, 0.1}, y0, a, 1.5);
    CHECK(sols.size() == 2);
    CHECK(gw_twist_count({0.3, 0.1}, y0, a, 1.5, sols) == 2);

    CHECK_THROWS_AS(gw_twist_count({0.3, 0.1}, y0, a, 0.0, {y0}), Error);
    CHECK_THROWS_AS(gw_twist_count({0.3, 0.1}, y0, {{1, 2}, {2, 4}}, 1.0, {y0}), Error);
  }
}
