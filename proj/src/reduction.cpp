#include "momt/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "momt/error.hpp"

namespace momt::reduction {

void validate_subset(const std::vector<int>& subset, int axes) {
  if (subset.empty()) throw Error(ErrorCode::kEmptySubset, "subset is empty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= axes) {
      throw Error(ErrorCode::kIndexOutOfRange, "axis " + std::to_string(subset[i] + 1) + " is out of range");
    }
    if (i > 0 && subset[i] <= subset[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "subset must be strictly increasing");
    }
  }
  if (subset.size() < 2) throw Error(ErrorCode::kSubsetTooSmall, "reduced problems need at least two axes");
  if (static_cast<int>(subset.size()) == axes) {
    throw Error(ErrorCode::kSubsetNotProper, "subset must omit at least one axis");
  }
}

DiscreteInstance ReducedProblem::to_instance() const {
  return DiscreteInstance::from_table(marginals, reduced_cost, sense);
}

ReducedProblem reduce(const DiscreteInstance& instance, const Potentials& potentials,
                      const std::vector<int>& subset) {
  validate_subset(subset, instance.axes());
  const double infeasibility = dual_infeasibility(instance, potentials);
  if (infeasibility > 1e-9) {
    throw Error(ErrorCode::kInfeasiblePotentials,
                "potentials violate the dual constraint by " + std::to_string(infeasibility));
  }
  ReducedProblem out;
  out.subset = subset;
  out.complement = complement_axes(subset, instance.axes());
  out.sense = instance.sense();
  const bool minimize = out.sense == Sense::kMin;
  const auto arities = instance.arities();

  std::vector<int> p_arities;
  std::vector<int> q_arities;
  for (int a : out.subset) {
    p_arities.push_back(arities[a]);
    out.marginals.push_back(instance.marginal(a));
    out.inherited.vectors.push_back(potentials.vectors[a]);
  }
  for (int a : out.complement) {
    q_arities.push_back(arities[a]);
    const auto& w = instance.marginal(a).weights;
    for (std::size_t i = 0; i < w.size(); ++i) out.complement_dual_value += w[i] * potentials.vectors[a][i];
  }
  const Grid p_grid(p_arities);
  const Grid q_grid(q_arities);
  out.reduced_cost = costs::CostTensor{p_grid, std::vector<double>(p_grid.size())};
  out.argmin_witness.resize(p_grid.size());

  // Complement potentials summed once per complement cell.
  std::vector<double> q_phi(q_grid.size(), 0.0);
  {
    MultiIndex q(q_arities.size(), 0);
    std::size_t cell = 0;
    do {
      for (std::size_t i = 0; i < q.size(); ++i) q_phi[cell] += potentials.vectors[out.complement[i]][q[i]];
      ++cell;
    } while (q_grid.next(q));
  }

  MultiIndex p(p_arities.size(), 0);
  MultiIndex full(arities.size());
  std::vector<double> values(q_grid.size());
  std::size_t p_cell = 0;
  do {
    for (std::size_t i = 0; i < p.size(); ++i) full[out.subset[i]] = p[i];
    MultiIndex q(q_arities.size(), 0);
    std::size_t q_cell = 0;
    double best = minimize ? INFINITY : -INFINITY;
    do {
      for (std::size_t i = 0; i < q.size(); ++i) full[out.complement[i]] = q[i];
      values[q_cell] = instance.cost_at(full) - q_phi[q_cell];
      best = minimize ? std::min(best, values[q_cell]) : std::max(best, values[q_cell]);
      ++q_cell;
    } while (q_grid.next(q));
    std::size_t witness = 0;
    while (std::abs(values[witness] - best) > 1e-12) ++witness;
    out.reduced_cost.values[p_cell] = best;
    out.argmin_witness[p_cell] = q_grid.unravel(witness);
    ++p_cell;
  } while (p_grid.next(p));
  return out;
}

ReductionReport verify_reduction_optimality(const DiscreteInstance& instance, const Coupling& plan,
                                            const Potentials& potentials, const std::vector<int>& subset,
                                            double tolerance) {
  const ReducedProblem reduced = reduce(instance, potentials, subset);
  const DiscreteInstance sub = reduced.to_instance();
  const lp::Solution solution = lp::solve(sub);
  const Coupling image = pushforward(plan, subset);

  ReductionReport report;
  report.subset = subset;
  report.reduced_optimum = solution.value;
  report.pushforward_value = sub.plan_cost(image);
  report.gap = std::abs(report.pushforward_value - report.reduced_optimum);
  report.split_gap = solution.value + reduced.complement_dual_value - instance.plan_cost(plan);
  report.inherited_infeasibility = dual_infeasibility(sub, reduced.inherited);
  report.inherited_dual_gap =
      std::abs(reduced.inherited.dual_value(sub.weights()) - report.reduced_optimum);
  report.pass = report.gap <= tolerance;
  return report;
}

ReductionReport verify_reduction_optimality(const DiscreteInstance& instance, const Coupling& plan,
                                            const std::vector<int>& subset, double tolerance) {
  return verify_reduction_optimality(instance, plan, lp::solve(instance).potentials, subset, tolerance);
}

ReductionChain reduce_chain(const DiscreteInstance& instance, const Potentials& potentials) {
  const int n = instance.axes();
  ReductionChain chain;
  for (int j = 2; j <= n - 1; ++j) {
    std::vector<int> subset(j);
    std::iota(subset.begin(), subset.end(), 0);
    chain.problems.push_back(reduce(instance, potentials, subset));
  }
  const bool minimize = instance.sense() == Sense::kMin;
  for (int j = 2; j <= n - 1; ++j) {
    const costs::CostTensor& lower = chain.problems[j - 2].reduced_cost;
    const costs::CostTensor& upper = j + 1 <= n - 1 ? chain.problems[j - 1].reduced_cost : instance.table();
    const std::vector<double>& phi = potentials.vectors[j];
    MultiIndex index(j, 0);
    MultiIndex extended(j + 1);
    do {
      std::copy(index.begin(), index.end(), extended.begin());
      double best = minimize ? INFINITY : -INFINITY;
      for (std::size_t x = 0; x < phi.size(); ++x) {
        extended[j] = static_cast<int>(x);
        const double v = upper.at(extended) - phi[x];
        best = minimize ? std::min(best, v) : std::max(best, v);
      }
      chain.max_nesting_deviation = std::max(chain.max_nesting_deviation, std::abs(lower.at(index) - best));
    } while (lower.grid.next(index));
  }
  if (chain.max_nesting_deviation > 1e-10) {
    throw Error(ErrorCode::kInvariantViolation,
                "reduced cost chain is not nested (deviation " + std::to_string(chain.max_nesting_deviation) + ")");
  }
  return chain;
}

std::vector<int> graph_map(const Coupling& plan) {
  std::vector<int> map(plan.arities().at(0), -1);
  for (const auto& [index, mass] : plan.entries()) {
    if (map[index[0]] >= 0) return {};
    map[index[0]] = index[1];
  }
  return map;
}

Reconstruction reconstruct_bigth(const DiscreteInstance& instance, const Potentials& potentials,
                                 int residual_axis, double tolerance) {
  const int n = instance.axes();
  if (residual_axis < 1 || residual_axis >= n) {
    throw Error(ErrorCode::kIndexOutOfRange, "residual axis must be one of axes 2..N");
  }
  const auto arities = instance.arities();
  Reconstruction out;
  out.report.residual_axis = residual_axis;
  out.report.maps.resize(n);

  Coupling base(std::vector<int>{arities[0]});
  const auto& mu = instance.marginal(0).weights;
  for (int i = 0; i < arities[0]; ++i) base.add({i}, mu[i]);

  std::vector<BlockMap> maps;
  Disintegration residual;
  for (int j = 1; j < n; ++j) {
    Coupling plan;
    if (n == 2) {
      plan = lp::solve(instance).plan;
    } else {
      plan = lp::solve(reduce(instance, potentials, {0, j}).to_instance()).plan;
    }
    if (j == residual_axis) {
      residual = disintegrate(plan, {0});
      continue;
    }
    const std::vector<int> map = graph_map(plan);
    if (map.empty()) {
      throw Error(ErrorCode::kNotAGraph,
                  "reduced plan for axes (1," + std::to_string(j + 1) + ") is not a graph over axis 1");
    }
    out.report.maps[j] = map;
    BlockMap block{{j}, {}};
    for (int i = 0; i < arities[0]; ++i) {
      if (map[i] >= 0) block.image[{i}] = {map[i]};
    }
    maps.push_back(std::move(block));
  }
  // The residual conditionals are keyed by the residual plan's own base,
  // which matches mu up to solver round-off.
  out.plan = assemble_product_conditional(residual.base, {0}, maps, ResidualBlock{{residual_axis}, &residual},
                                          arities);
  if (max_abs_difference(residual.base, base) > kGluingTolerance) {
    throw Error(ErrorCode::kMarginalMismatch, "reduced plan does not carry the first marginal");
  }
  out.report.value = instance.plan_cost(out.plan);
  out.report.dual_value = potentials.dual_value(instance.weights());
  out.report.marginal_deviation = marginal_deviation(instance, out.plan);
  out.report.optimal = std::abs(out.report.value - out.report.dual_value) <= tolerance &&
                       out.report.marginal_deviation <= 1e-9;
  return out;
}

}  // namespace momt::reduction
