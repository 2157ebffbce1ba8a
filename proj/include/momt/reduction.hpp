#pragma once

#include <vector>

#include "momt/instance.hpp"
#include "momt/lp.hpp"

namespace momt::reduction {

// Validates a reduced-problem subset (0-based axes): strictly increasing,
// in range, at least two axes and not all of them.
void validate_subset(const std::vector<int>& subset, int axes);

// Cost on the sub-product of `subset` obtained by optimizing out the
// complementary axes after subtracting their potentials.
struct ReducedProblem {
  std::vector<int> subset;
  std::vector<int> complement;
  Sense sense = Sense::kMin;
  costs::CostTensor reduced_cost;
  // Optimal complement multi-index per reduced-grid cell (row-major),
  // lexicographically least among ties.
  std::vector<MultiIndex> argmin_witness;
  Potentials inherited;
  std::vector<DiscreteMeasure> marginals;
  // sum over the complement of <phi_k, mu_k>.
  double complement_dual_value = 0.0;

  DiscreteInstance to_instance() const;
};

ReducedProblem reduce(const DiscreteInstance& instance, const Potentials& potentials,
                      const std::vector<int>& subset);

struct ReductionReport {
  std::vector<int> subset;
  double reduced_optimum = 0.0;
  double pushforward_value = 0.0;
  double gap = 0.0;
  // reduced optimum + complement dual value - full optimum
  double split_gap = 0.0;
  // inherited potentials: worst violation and |dual value - reduced optimum|
  double inherited_infeasibility = 0.0;
  double inherited_dual_gap = 0.0;
  bool pass = false;
};

// Checks that the pushforward of an optimal plan solves the reduced
// problem built from `potentials`.
ReductionReport verify_reduction_optimality(const DiscreteInstance& instance, const Coupling& plan,
                                            const Potentials& potentials, const std::vector<int>& subset,
                                            double tolerance = 1e-8);

// Solves the instance for its potentials first.
ReductionReport verify_reduction_optimality(const DiscreteInstance& instance, const Coupling& plan,
                                            const std::vector<int>& subset, double tolerance = 1e-8);

struct ReductionChain {
  std::vector<ReducedProblem> problems;  // subsets {0..j-1}, j = 2..N-1
  double max_nesting_deviation = 0.0;
};

// c_j for j = 2..N-1, checking c_j = opt_{x_{j+1}} (c_{j+1} - phi_{j+1})
// within 1e-10 (c_N is the cost itself). Throws InvariantViolation
// otherwise.
ReductionChain reduce_chain(const DiscreteInstance& instance, const Potentials& potentials);

struct ReconstructionReport {
  int residual_axis = 0;
  std::vector<std::vector<int>> maps;  // per axis; empty for axis 0 and the residual axis
  double value = 0.0;
  double dual_value = 0.0;
  double marginal_deviation = 0.0;
  bool optimal = false;
};

struct Reconstruction {
  Coupling plan;
  ReconstructionReport report;
};

// Rebuilds an N-marginal plan from the two-marginal reduced problems with
// costs c_{0j}: each j != residual_axis must be solved by a graph over
// axis 0 (else NotAGraph), and the residual plan enters through its
// disintegration over axis 0.
Reconstruction reconstruct_bigth(const DiscreteInstance& instance, const Potentials& potentials,
                                 int residual_axis, double tolerance = 1e-8);

// Index map of a two-axis plan that is a graph over axis 0, or empty when
// some axis-0 atom has more than one partner.
std::vector<int> graph_map(const Coupling& plan);

}  // namespace momt::reduction
