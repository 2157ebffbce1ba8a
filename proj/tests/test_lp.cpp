#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "momt/error.hpp"
#include "momt/lp.hpp"
#include "support.hpp"

using namespace momt;

namespace {

void check_solution(const DiscreteInstance& inst, const lp::Solution& sol) {
  CHECK(std::abs(sol.value - sol.dual_value) <= 1e-8);
  CHECK(lp::complementary_slackness_gap(inst, sol.plan, sol.potentials) <= 1e-8);
  CHECK(dual_infeasibility(inst, sol.potentials) <= 1e-9);
  CHECK(marginal_deviation(inst, sol.plan) <= 1e-12);
  CHECK(std::abs(sol.plan.total_mass() - 1.0) <= 1e-12);
  const auto gamma = lp::minimizing_set(inst, sol.potentials);
  for (const auto& idx : sol.plan.support()) CHECK(gamma.contains(idx));
}

// Every basic feasible solution found by scanning all column subsets.
std::size_t brute_force_vertex_count(const lp::EqualitySystem& sys) {
  const int n = sys.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sys.rows, n);
  for (int j = 0; j < n; ++j) {
    for (std::size_t t = 0; t < sys.columns[j].rows.size(); ++t) a(sys.columns[j].rows[t], j) = sys.columns[j].coeffs[t];
  }
  Eigen::VectorXd b(sys.rows);
  for (int i = 0; i < sys.rows; ++i) b[i] = sys.rhs[i];
  std::set<std::vector<long long>> seen;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < n; ++j) {
      if (mask >> j & 1u) cols.push_back(j);
    }
    Eigen::MatrixXd s(sys.rows, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) s.col(k) = a.col(cols[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    lu.setThreshold(1e-10);
    if (lu.rank() != static_cast<int>(cols.size())) continue;
    const Eigen::VectorXd x = s.colPivHouseholderQr().solve(b);
    if ((s * x - b).norm() > 1e-9 || x.minCoeff() <= 1e-12) continue;
    std::vector<long long> key(n, 0);
    for (std::size_t k = 0; k < cols.size(); ++k) key[cols[k]] = std::llround(x[k] * 1e9);
    seen.insert(key);
  }
  return seen.size();
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("2x2 diagonal cost") {
    const auto inst = testing::tensor_instance({{0.5, 0.5}, {0.5, 0.5}}, {0, 1, 1, 0});
    const auto sol = lp::solve(inst);
    CHECK(sol.value == doctest::Approx(0.0));
    CHECK(sol.plan.mass({0, 0}) == doctest::Approx(0.5));
    CHECK(sol.plan.mass({1, 1}) == doctest::Approx(0.5));
    check_solution(inst, sol);
  }

  TEST_CASE("singleton marginals") {
    const auto inst = testing::tensor_instance({{1.0}, {1.0}, {1.0}}, {4.25});
    const auto sol = lp::solve(inst);
    CHECK(sol.value == doctest::Approx(4.25));
    CHECK(sol.plan.mass({0, 0, 0}) == doctest::Approx(1.0));
  }

  TEST_CASE("3x3x3 surplus matches the oracle") {
    const auto inst = testing::point_instance(3, 3, 3, 2, costs::CostKind::kSurplus, Sense::kMax, false);
    const auto sol = lp::solve(inst);
    CHECK(std::abs(sol.value - lp::oracle_optimum(inst)) <= 1e-9);
    CHECK(lp::is_vertex(sol.plan, inst.weights()));
    check_solution(inst, sol);
  }

  TEST_CASE("random instances agree with the oracle and are vertices") {
    const std::vector<std::vector<int>> shapes = {{2, 2}, {3, 3}, {2, 4}, {4, 5}, {2, 2, 2}, {3, 2, 3}, {3, 3, 3}, {2, 3, 2, 2}};
    int seed = 100;
    for (const auto& shape : shapes) {
      for (Sense sense : {Sense::kMin, Sense::kMax}) {
        for (int rep = 0; rep < 3; ++rep) {
          const auto inst = testing::random_instance(++seed, shape, sense, rep == 0);
          const auto sol = lp::solve(inst);
          CAPTURE(seed);
          check_solution(inst, sol);
          CHECK(std::abs(sol.value - lp::oracle_optimum(inst)) <= 1e-9);
          CHECK(lp::is_vertex(sol.plan, inst.weights()));
        }
      }
    }
  }

  TEST_CASE("potentials use the canonical gauge") {
    const auto inst = testing::random_instance(9, {3, 4, 2}, Sense::kMin);
    const auto sol = lp::solve(inst);
    for (int k = 1; k < inst.axes(); ++k) {
      double mean = 0.0;
      for (int i = 0; i < inst.marginal(k).size(); ++i) mean += sol.potentials.vectors[k][i] * inst.marginal(k).weights[i];
      CHECK(std::abs(mean) <= 1e-12);
    }
  }

  TEST_CASE("size and finiteness guards") {
    const auto inst = testing::random_instance(1, {4, 4, 4}, Sense::kMin);
    lp::SolveOptions options;
    options.max_cells = 10;
    CHECK_THROWS_AS(lp::solve(inst, options), Error);
    try {
      testing::tensor_instance({{1.0}, {1.0}}, {INFINITY});
      FAIL("expected NonFiniteCost");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonFiniteCost);
    }
  }

  TEST_CASE("is_vertex on graphs and products") {
    const std::vector<double> mu = {0.2, 0.3, 0.5};
    const Coupling g = graph_coupling(mu, {2, 0, 1}, 3);
    CHECK(lp::is_vertex(g, {mu, {0.3, 0.5, 0.2}}));
    const std::vector<double> u = {0.5, 0.5};
    CHECK_FALSE(lp::is_vertex(product_coupling({u, u}), {u, u}));
    CHECK_THROWS_AS(lp::is_vertex(product_coupling({u, u}), {u, {0.4, 0.6}}), Error);
  }

  TEST_CASE("oracle vertex counts") {
    const auto u = testing::uniform_weights(2);
    const auto two = lp::oracle_enumerate(testing::tensor_instance({u, u}, {0, 0, 0, 0}));
    CHECK(two.size() == 2);
    for (const auto& v : two) CHECK(v.plan.support_size() == 2);
    CHECK(lp::oracle_enumerate(testing::tensor_instance({{1.0}, {1.0}, {1.0}}, {0.0})).size() == 1);

    const auto cube = testing::tensor_instance({u, u, u}, std::vector<double>(8, 0.0));
    const auto vertices = lp::oracle_enumerate(cube);
    CHECK(vertices.size() == brute_force_vertex_count(lp::transport_system(cube.weights())));
    CHECK(vertices.size() > 2);

    std::mt19937_64 rng(12);
    const std::vector<std::vector<double>> w = {testing::random_weights(rng, 2), testing::random_weights(rng, 2),
                                                testing::random_weights(rng, 2)};
    const auto generic = testing::tensor_instance(w, std::vector<double>(8, 0.0));
    CHECK(lp::oracle_enumerate(generic).size() == brute_force_vertex_count(lp::transport_system(w)));
  }

  TEST_CASE("every vertex of the 3-marginal polytope is a vertex of the XY-constrained polytope") {
    for (int seed = 1; seed <= 5; ++seed) {
      std::mt19937_64 rng(seed);
      const std::vector<std::vector<double>> w = {testing::random_weights(rng, 2), testing::random_weights(rng, 2),
                                                  testing::random_weights(rng, 2)};
      const auto inst = testing::tensor_instance(w, std::vector<double>(8, 0.0));
      for (const auto& v : lp::oracle_enumerate(inst)) {
        const Coupling xy = pushforward(v.plan, {0, 1});
        lp::EqualitySystem sys;
        sys.rows = 4 + 2;
        sys.rhs.assign(6, 0.0);
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) sys.rhs[2 * x + y] = xy.mass({x, y});
        }
        sys.rhs[4] = w[2][0];
        sys.rhs[5] = w[2][1];
        std::vector<double> dense;
        for (std::size_t c = 0; c < inst.grid().size(); ++c) {
          const auto i = inst.grid().unravel(c);
          sys.columns.push_back({{2 * i[0] + i[1], 4 + i[2]}, {1.0, 1.0}});
          dense.push_back(v.plan.mass(i));
        }
        CHECK(lp::is_vertex(sys, dense));
      }
    }
  }

  TEST_CASE("uniqueness certificate") {
    const auto u = testing::uniform_weights(2);
    const auto diag = testing::tensor_instance({u, u}, {0, 1, 1, 0});
    const auto s1 = lp::solve(diag);
    const auto c1 = lp::uniqueness_certificate(diag, s1.plan, s1.value);
    CHECK(c1.status == lp::UniquenessStatus::kUnique);
    CHECK_FALSE(c1.witness.has_value());

    const auto zero = testing::tensor_instance({u, u}, {0, 0, 0, 0});
    const auto s0 = lp::solve(zero);
    const auto c0 = lp::uniqueness_certificate(zero, s0.plan, s0.value);
    CHECK(c0.status == lp::UniquenessStatus::kNonUnique);
    REQUIRE(c0.witness.has_value());
    CHECK(marginal_deviation(zero, *c0.witness) <= 1e-12);
    CHECK(std::abs(zero.plan_cost(*c0.witness) - s0.value) <= 1e-8);
    CHECK(total_variation(*c0.witness, s0.plan) > 1e-6);
  }

  TEST_CASE("strictly complementary potentials certify the support") {
    const auto inst = testing::point_instance(21, 3, 4, 2, costs::CostKind::kSurplus, Sense::kMax);
    const auto sol = lp::solve(inst);
    const auto strict = lp::strictly_complementary_potentials(inst, sol.plan);
    CHECK(strict.margin > 0.0);
    CHECK(dual_infeasibility(inst, strict.potentials) <= 1e-9);
    CHECK(std::abs(strict.potentials.dual_value(inst.weights()) - sol.value) <= 1e-8);
    const auto gamma = lp::minimizing_set(inst, strict.potentials, strict.margin / 2);
    CHECK(gamma.indices == sol.plan.support());
  }

  TEST_CASE("surplus maximization and attractive minimization agree") {
    for (int seed = 1; seed <= 5; ++seed) {
      const auto sur = testing::point_instance(seed, 3, 4, 2, costs::CostKind::kSurplus, Sense::kMax, false);
      const auto att = testing::point_instance(seed, 3, 4, 2, costs::CostKind::kAttractive, Sense::kMin, false);
      CHECK(max_abs_difference(lp::solve(sur).plan, lp::solve(att).plan) <= 1e-12);
    }
  }
}
