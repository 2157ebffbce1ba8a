#pragma once

#include <vector>

#include "momt/costs.hpp"
#include "momt/instance.hpp"

namespace momt::costs {

// u_j(t) = |t|^2 / 2 + psi_j(t) sampled at the sums x_1 + x_j (all atom
// pairs) and at the atoms of axis j, where psi_j(t) maximizes
// <t, sum of the other points> + their pairwise products - their potentials.
ConjugateTable gangbo_swiech_table(const DiscreteInstance& instance, const Potentials& potentials, int axis);

struct GangboSwiechMaps {
  // Discrete gradient of phi_1 per axis-0 atom (sum of the other points at
  // the argmax of c - sum_{k>=2} phi_k), flagged when that argmax is tied.
  std::vector<Point> dphi1;
  std::vector<bool> dphi1_tied;
  // images[j][x]: Du*_j(x + Dphi_1(x)) - x; maps[j][x]: nearest atom of
  // axis j. Index 0 is unused.
  std::vector<std::vector<Point>> images;
  std::vector<std::vector<int>> maps;
  std::vector<std::vector<bool>> tied;
  // Comparison with the plan's support over untied atoms.
  int compared = 0;
  int agreeing = 0;
  int excluded_tied = 0;
  double agreement_fraction = 0.0;
  double max_distance = 0.0;
};

// Evaluates the map formula T_j(x) = Du*_j(x + Dphi_1(x)) - x for the
// surplus cost (maximization, N >= 3) and compares it with `plan`.
GangboSwiechMaps gangbo_swiech_maps(const DiscreteInstance& instance, const Potentials& potentials,
                                    const Coupling& plan);

}  // namespace momt::costs
