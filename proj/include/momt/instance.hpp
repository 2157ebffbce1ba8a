#pragma once

#include <vector>

#include "momt/costs.hpp"
#include "momt/measure.hpp"

namespace momt {

// N weighted point clouds plus a cost: the transport problem statement.
// Zero-weight atoms are dropped at construction and the cost is tabulated
// once over the surviving grid.
class DiscreteInstance {
 public:
  DiscreteInstance(std::vector<DiscreteMeasure> marginals, costs::CostSpec cost);

  // Instance with an explicit cost table (points are still carried along).
  static DiscreteInstance from_table(std::vector<DiscreteMeasure> marginals, costs::CostTensor table,
                                     Sense sense);

  const std::vector<DiscreteMeasure>& marginals() const { return marginals_; }
  const DiscreteMeasure& marginal(int axis) const { return marginals_.at(axis); }
  const costs::CostSpec& cost() const { return cost_; }
  Sense sense() const { return cost_.sense; }
  const costs::CostTensor& table() const { return table_; }
  const Grid& grid() const { return table_.grid; }
  int axes() const { return static_cast<int>(marginals_.size()); }
  std::vector<int> arities() const;
  std::vector<std::vector<double>> weights() const;

  double cost_at(std::span<const int> index) const { return table_.at(index); }
  double plan_cost(const Coupling& plan) const;

  // Original atom indices kept per axis (identity unless null atoms were dropped).
  const std::vector<std::vector<int>>& kept_atoms() const { return kept_; }

 private:
  DiscreteInstance() = default;

  std::vector<DiscreteMeasure> marginals_;
  costs::CostSpec cost_;
  costs::CostTensor table_;
  std::vector<std::vector<int>> kept_;
};

// One real vector per marginal: a dual solution (phi_1, ..., phi_N).
struct Potentials {
  std::vector<std::vector<double>> vectors;

  double sum_at(std::span<const int> index) const;
  double dual_value(const std::vector<std::vector<double>>& weights) const;
};

// Largest violation of sum phi <= c (min) or sum phi >= c (max) over the grid.
double dual_infeasibility(const DiscreteInstance& instance, const Potentials& potentials);

// Checks that each axis marginal of `plan` matches the instance.
double marginal_deviation(const DiscreteInstance& instance, const Coupling& plan);

}  // namespace momt
