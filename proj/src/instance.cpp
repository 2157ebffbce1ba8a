#include "momt/instance.hpp"

#include <algorithm>
#include <cmath>

#include "momt/error.hpp"

namespace momt {

namespace {

costs::CostTensor slice_table(const costs::CostTensor& table, const std::vector<std::vector<int>>& kept) {
  std::vector<int> arities;
  for (const auto& k : kept) arities.push_back(static_cast<int>(k.size()));
  costs::CostTensor out{Grid(arities), {}};
  out.values.reserve(out.grid.size());
  MultiIndex index(arities.size(), 0);
  MultiIndex original(arities.size());
  do {
    for (std::size_t a = 0; a < arities.size(); ++a) original[a] = kept[a][index[a]];
    out.values.push_back(table.at(original));
  } while (out.grid.next(index));
  return out;
}

}  // namespace

DiscreteInstance::DiscreteInstance(std::vector<DiscreteMeasure> marginals, costs::CostSpec cost)
    : marginals_(std::move(marginals)), cost_(std::move(cost)) {
  if (marginals_.empty()) throw Error(ErrorCode::kSchemaError, "instance needs at least one marginal");
  for (const auto& m : marginals_) validate_measure(m);
  costs::validate_spec(cost_, axes());
  bool dropped = false;
  for (auto& m : marginals_) {
    const int before = m.size();
    kept_.push_back(drop_null_atoms(m));
    dropped |= m.size() != before;
    if (m.size() == 0) throw Error(ErrorCode::kSchemaError, "marginal without positive mass");
  }
  if (cost_.kind == costs::CostKind::kTensor) {
    if (dropped) {
      cost_.tensor = std::make_shared<const costs::CostTensor>(slice_table(*cost_.tensor, kept_));
    }
    table_ = *cost_.tensor;
  } else {
    std::vector<const Space*> spaces;
    for (const auto& m : marginals_) spaces.push_back(&m.space);
    table_ = costs::tabulate(cost_, spaces);
  }
  if (table_.grid.arities() != arities()) {
    throw Error(ErrorCode::kSchemaError, "cost table shape differs from the marginals");
  }
}

DiscreteInstance DiscreteInstance::from_table(std::vector<DiscreteMeasure> marginals,
                                              costs::CostTensor table, Sense sense) {
  costs::CostSpec spec;
  spec.kind = costs::CostKind::kTensor;
  spec.sense = sense;
  spec.tensor = std::make_shared<const costs::CostTensor>(std::move(table));
  return DiscreteInstance(std::move(marginals), std::move(spec));
}

std::vector<int> DiscreteInstance::arities() const {
  std::vector<int> out;
  for (const auto& m : marginals_) out.push_back(m.size());
  return out;
}

std::vector<std::vector<double>> DiscreteInstance::weights() const {
  std::vector<std::vector<double>> out;
  for (const auto& m : marginals_) out.push_back(m.weights);
  return out;
}

double DiscreteInstance::plan_cost(const Coupling& plan) const {
  double total = 0.0;
  for (const auto& [index, mass] : plan.entries()) total += mass * cost_at(index);
  return total;
}

double Potentials::sum_at(std::span<const int> index) const {
  double s = 0.0;
  for (std::size_t k = 0; k < vectors.size(); ++k) s += vectors[k][index[k]];
  return s;
}

double Potentials::dual_value(const std::vector<std::vector<double>>& weights) const {
  double total = 0.0;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    for (std::size_t i = 0; i < vectors[k].size(); ++i) total += vectors[k][i] * weights[k][i];
  }
  return total;
}

double dual_infeasibility(const DiscreteInstance& instance, const Potentials& potentials) {
  const double sign = instance.sense() == Sense::kMin ? 1.0 : -1.0;
  double worst = 0.0;
  MultiIndex index(instance.axes(), 0);
  do {
    const double slack = sign * (instance.cost_at(index) - potentials.sum_at(index));
    worst = std::max(worst, -slack);
  } while (instance.grid().next(index));
  return worst;
}

double marginal_deviation(const DiscreteInstance& instance, const Coupling& plan) {
  if (plan.arities() != instance.arities()) return INFINITY;
  double worst = 0.0;
  for (int k = 0; k < instance.axes(); ++k) {
    const auto m = plan.axis_marginal(k);
    for (std::size_t i = 0; i < m.size(); ++i) {
      worst = std::max(worst, std::abs(m[i] - instance.marginal(k).weights[i]));
    }
  }
  return worst;
}

}  // namespace momt
