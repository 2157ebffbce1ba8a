#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "momt/costs.hpp"
#include "momt/measure.hpp"

namespace momt::extremality {

struct CycleViolation {
  std::vector<MultiIndex> points;
  // permutations[k] reorders axis k + 1 across the points.
  std::vector<std::vector<int>> permutations;
  double original = 0.0;
  double permuted = 0.0;
};

struct MonotonicityResult {
  bool pass = true;
  std::optional<CycleViolation> violation;
  long cycles_checked = 0;
};

// No reshuffling of the listed support points by per-axis permutations
// improves the total cost (lower for kMin, higher for kMax). All subsets of
// size <= max_cycle are tested exhaustively, plus `samples` random larger
// subsets with random permutations.
MonotonicityResult check_cyclical_monotonicity(const std::vector<MultiIndex>& support,
                                               const costs::CostTensor& cost, Sense sense, int max_cycle = 3,
                                               int samples = 0, std::uint64_t seed = 1);

// Ordered partition of the second-block index set.
struct OrderedPartition {
  std::vector<std::vector<MultiIndex>> blocks;
};

struct FiberEntry {
  MultiIndex x;                   // first-block index
  std::vector<MultiIndex> fiber;  // F(x), second-block indices
  std::vector<MultiIndex> argmax; // f(x), ties kept
  std::optional<int> block;       // iota(x) under a partition
};

struct FiberReport {
  std::vector<int> first_axes;
  std::vector<int> second_axes;
  std::vector<FiberEntry> atoms;  // ordered by x

  std::size_t max_fiber() const;
};

// F(x) = {y : (x,y) in support} and f(x) = argmax of the cost over F(x)
// (over F(x) restricted to the least partition block meeting it, when a
// partition is given).
FiberReport fiber_report(const std::vector<MultiIndex>& support, const costs::CostTensor& cost,
                         const std::vector<int>& first_axes,
                         const std::optional<OrderedPartition>& partition = std::nullopt);

struct ExtremeViolation {
  MultiIndex x1;
  MultiIndex x2;
  MultiIndex shared;
};

struct ExtremeResult {
  bool pass = true;
  std::optional<ExtremeViolation> violation;
};

// Condition (ii): for x1 != x2 and every y_i in f(x_i), the sets
// F(x1)\{y1} and F(x2)\{y2} are disjoint. Condition (i) holds because
// every finite nonempty fiber has an argmax.
ExtremeResult check_c_extreme(const FiberReport& report);

// Coupling as a finite union of weighted graphs over one axis. maps[k][x]
// is the image (indices of the other axes, increasing) of atom x; atoms
// with fewer than k+1 images reuse their first image with weight 0.
struct MapDecomposition {
  int first_axis = 0;
  std::vector<std::vector<MultiIndex>> maps;
  std::vector<std::vector<double>> weights;
};

struct DecompositionResult {
  bool decomposable = true;
  int max_fiber = 0;
  MapDecomposition decomposition;
};

DecompositionResult detect_map_decomposition(const Coupling& plan, int first_axis, int max_maps = 1 << 30);

// sum_k alpha_k(x) delta_{T_k(x)} recombined against mu.
Coupling recombine(const MapDecomposition& d, const std::vector<double>& mu, const std::vector<int>& arities);

// Candidates y solving y = y0 + (2/xi) A^{-T} x0 (|y0|^2 - |y|^2) within 1e-8.
int gw_twist_count(const Point& x0, const Point& y0, const std::vector<std::vector<double>>& a, double xi,
                   const std::vector<Point>& candidates);

// The closed-form solutions of the same equation (one or two points).
std::vector<Point> gw_twist_solutions(const Point& x0, const Point& y0, const std::vector<std::vector<double>>& a,
                                      double xi);

}  // namespace momt::extremality
