#include <doctest.h>

#include <random>

#include "momt/error.hpp"
#include "momt/lp.hpp"
#include "momt/measure.hpp"
#include "momt/twomap.hpp"
#include "support.hpp"

using namespace momt;

namespace {

Coupling random_coupling(std::mt19937_64& rng, std::vector<int> arities, double density = 0.7) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid grid(arities);
  std::vector<double> mass(grid.size());
  double total = 0.0;
  for (auto& m : mass) {
    m = u(rng) < density ? u(rng) + 0.05 : 0.0;
    total += m;
  }
  Coupling c(arities);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0) c.add(grid.unravel(i), mass[i] / total);
  }
  return c;
}

}  // namespace

TEST_SUITE("measure") {
  TEST_CASE("grid order is lexicographic") {
    Grid g({2, 3});
    MultiIndex i(2, 0);
    std::size_t k = 0;
    do {
      CHECK(g.ravel(i) == k);
      CHECK(g.unravel(k) == i);
      ++k;
    } while (g.next(i));
    CHECK(k == 6);
  }

  TEST_CASE("measure validation") {
    DiscreteMeasure m = testing::line_measure("X", {0.5, 0.4});
    CHECK_THROWS_AS(validate_measure(m), Error);
    m.weights = {0.5, 0.5};
    CHECK_NOTHROW(validate_measure(m));
    m.space.points[1] = m.space.points[0];
    CHECK_THROWS_AS(validate_measure(m), Error);
  }

  TEST_CASE("null atoms are dropped") {
    DiscreteMeasure m = testing::line_measure("X", {0.5, 0.0, 0.5});
    const auto kept = drop_null_atoms(m);
    CHECK(kept == std::vector<int>{0, 2});
    CHECK(m.size() == 2);
  }

  TEST_CASE("pushforward of a product is a product") {
    const auto u = testing::uniform_weights(2);
    const Coupling p = product_coupling({u, u, u});
    const Coupling q = pushforward(p, {0, 2});
    CHECK(max_abs_difference(q, product_coupling({u, u})) <= 1e-15);
  }

  TEST_CASE("pushforward of a Dirac") {
    Coupling d({2, 2, 2});
    d.add({0, 1, 1}, 1.0);
    const Coupling q = pushforward(d, {1, 2});
    CHECK(q.support_size() == 1);
    CHECK(q.mass({1, 1}) == doctest::Approx(1.0));
  }

  TEST_CASE("pushforward subset errors") {
    const Coupling p = product_coupling({{1.0}, {1.0}});
    CHECK_THROWS_AS(pushforward(p, {}), Error);
    CHECK_THROWS_AS(pushforward(p, {0, 2}), Error);
  }

  TEST_CASE("pushforward preserves axis marginals") {
    std::mt19937_64 rng(4);
    const Coupling c = random_coupling(rng, {3, 2, 4});
    const Coupling q = pushforward(c, {0, 2});
    const auto a = c.axis_marginal(2), b = q.axis_marginal(1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }

  TEST_CASE("pushforward of an optimal 3x3x3 plan solves the reduced problem") {
    const DiscreteInstance inst = testing::random_instance(3, {3, 3, 3}, Sense::kMin);
    const auto sol = lp::solve(inst);
    const auto oracle = lp::oracle_optimum(inst);
    CHECK(std::abs(oracle - sol.value) <= 1e-9);
  }

  TEST_CASE("disintegration of a product gives the other marginal") {
    const std::vector<double> mu = {0.25, 0.75}, nu = {0.1, 0.6, 0.3};
    const auto d = disintegrate(product_coupling({mu, nu}), {0});
    REQUIRE(d.conditionals.size() == 2);
    for (const auto& [x, cond] : d.conditionals) {
      for (int j = 0; j < 3; ++j) CHECK(std::abs(cond.mass({j}) - nu[j]) <= 1e-15);
    }
  }

  TEST_CASE("disintegration of a graph gives Diracs") {
    const std::vector<double> mu = {0.2, 0.3, 0.5};
    const std::vector<int> t = {2, 0, 1};
    const auto d = disintegrate(graph_coupling(mu, t, 3), {0});
    for (const auto& [x, cond] : d.conditionals) {
      CHECK(cond.support_size() == 1);
      CHECK(cond.mass({t[x[0]]}) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("disintegration round trip on every conditioning subset") {
    std::mt19937_64 rng(7);
    const Coupling c2 = random_coupling(rng, {4, 3});
    CHECK(max_abs_difference(recombine(disintegrate(c2, {0})), c2) <= 1e-14);
    const Coupling c3 = random_coupling(rng, {3, 2, 3});
    for (const std::vector<int>& s : {std::vector<int>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
      const auto d = disintegrate(c3, s);
      CHECK(max_abs_difference(recombine(d), c3) <= 1e-12);
      for (const auto& [b, cond] : d.conditionals) CHECK(d.base.mass(b) > 0.0);
    }
    CHECK_THROWS_AS(disintegrate(c3, {0, 1, 2}), Error);
  }

  TEST_CASE("gluing independent products") {
    const std::vector<double> mu = {0.4, 0.6};
    const Coupling g = glue(product_coupling({mu, mu}), product_coupling({mu, mu}));
    CHECK(max_abs_difference(g, product_coupling({mu, mu, mu})) <= 1e-15);
  }

  TEST_CASE("gluing restrictions match the inputs") {
    std::mt19937_64 rng(11);
    const Coupling left = random_coupling(rng, {3, 4});
    // A right coupling with the same first marginal: reweight a random one.
    const Coupling raw = random_coupling(rng, {3, 2}, 1.0);
    const auto want = left.axis_marginal(0), have = raw.axis_marginal(0);
    Coupling right({3, 2});
    for (const auto& [i, m] : raw.entries()) right.add(i, m * want[i[0]] / have[i[0]]);
    const Coupling g = glue(left, right);
    CHECK(max_abs_difference(pushforward(g, {0, 1}), left) <= 1e-12);
    CHECK(max_abs_difference(pushforward(g, {0, 2}), right) <= 1e-12);
  }

  TEST_CASE("gluing rejects mismatched first marginals") {
    const Coupling a = product_coupling({{0.5, 0.5}, {1.0}});
    const Coupling b = product_coupling({{0.4, 0.6}, {1.0}});
    CHECK_THROWS_AS(glue(a, b), Error);
  }

  TEST_CASE("deterministic side makes the glued plan the unique constrained coupling") {
    // Oracle: enumerate vertices of the doubly-constrained polytope.
    std::mt19937_64 rng(5);
    const std::vector<double> mu = {0.3, 0.3, 0.4};
    const Coupling left = graph_coupling(mu, {1, 2, 1}, 3);
    Coupling right({3, 3});
    for (int x = 0; x < 3; ++x) {
      const auto w = testing::random_weights(rng, 3);
      for (int z = 0; z < 3; ++z) right.add({x, z}, mu[x] * w[z]);
    }
    const Coupling g = glue(left, right);
    std::vector<double> x(27, 0.0);
    Grid grid({3, 3, 3});
    for (const auto& [i, m] : g.entries()) x[grid.ravel(i)] = m;
    const auto vertices = lp::enumerate_vertices(twomap::constrained_system(left, right));
    REQUIRE(vertices.size() == 1);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(std::abs(vertices[0][j] - x[j]) <= 1e-12);
  }

  TEST_CASE("assembly identities") {
    std::mt19937_64 rng(2);
    const Coupling c = random_coupling(rng, {2, 3, 2});
    const auto d = disintegrate(c, {0});
    const Coupling same = assemble_product_conditional(d.base, {0}, {}, ResidualBlock{{1, 2}, &d}, c.arities());
    CHECK(max_abs_difference(same, c) <= 1e-14);

    const std::vector<double> mu = {0.5, 0.5};
    BlockMap t{{1}, {{{0}, {2}}, {{1}, {0}}}};
    BlockMap s{{2}, {{{0}, {1}}, {{1}, {1}}}};
    const Coupling base = product_coupling({mu});
    const Coupling graph = assemble_product_conditional(base, {0}, {t, s}, std::nullopt, {2, 3, 2});
    CHECK(graph.support_size() == 2);
    CHECK(graph.mass({0, 2, 1}) == doctest::Approx(0.5));
    CHECK(graph.mass({1, 0, 1}) == doctest::Approx(0.5));

    BlockMap gap{{1}, {{{0}, {2}}}};
    CHECK_THROWS_AS(assemble_product_conditional(base, {0}, {gap, s}, std::nullopt, {2, 3, 2}), Error);
  }
}
