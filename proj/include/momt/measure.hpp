#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "momt/grid.hpp"

namespace momt {

using Point = std::vector<double>;

inline constexpr double kMassFloor = 1e-15;
inline constexpr double kStorageTolerance = 1e-12;
inline constexpr double kGluingTolerance = 1e-10;

// Named cloud of distinct points in R^d.
struct Space {
  std::string name;
  std::vector<Point> points;

  int size() const { return static_cast<int>(points.size()); }
  int dimension() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

// Validates the Space invariants: nonempty, common dimension, pairwise
// distinct points. Throws Error(kSchemaError) on violation.
void validate_space(const Space& space);

struct DiscreteMeasure {
  Space space;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

// Nonnegative weights summing to one, one per atom.
void validate_measure(const DiscreteMeasure& measure);

// Removes zero-weight atoms (positive-mass atoms play the role of full
// measure sets). Returns the surviving original atom indices.
std::vector<int> drop_null_atoms(DiscreteMeasure& measure);

// Sparse nonnegative mass on a product of atom sets. Entries below
// kMassFloor are pruned on insertion.
class Coupling {
 public:
  using Entries = std::map<MultiIndex, double>;

  Coupling() = default;
  explicit Coupling(std::vector<int> arities);
  Coupling(std::vector<int> arities, Entries entries);

  const std::vector<int>& arities() const { return arities_; }
  int axes() const { return static_cast<int>(arities_.size()); }
  const Entries& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  double mass(const MultiIndex& index) const;
  double total_mass() const;

  // Adds `mass` at `index`, pruning the entry if it stays below the floor.
  void add(const MultiIndex& index, double mass);

  // Mass of each atom along one axis.
  std::vector<double> axis_marginal(int axis) const;

  std::vector<MultiIndex> support() const;

 private:
  std::vector<int> arities_;
  Entries entries_;
};

// 0.5 * sum |a - b| over the union of supports.
double total_variation(const Coupling& a, const Coupling& b);

// Largest absolute entrywise difference.
double max_abs_difference(const Coupling& a, const Coupling& b);

// Product measure of the given weight vectors.
Coupling product_coupling(const std::vector<std::vector<double>>& weights);

// (id x T)#mu for an index map T on the atoms of mu.
Coupling graph_coupling(const std::vector<double>& mu, const std::vector<int>& map, int target_size);

// Conditional law of the complementary axes given the conditioning axes.
struct Disintegration {
  std::vector<int> conditioning;  // axes of the source coupling, increasing
  std::vector<int> complement;    // remaining axes, increasing
  Coupling base;                  // pushforward onto the conditioning axes
  // Keyed by positive-mass base atoms only.
  std::map<MultiIndex, Coupling> conditionals;
};

// Marginal on the axes in `subset` (0-based, strictly increasing).
Coupling pushforward(const Coupling& plan, const std::vector<int>& subset);

Disintegration disintegrate(const Coupling& plan, const std::vector<int>& conditioning);

// Rebuilds the source coupling: base mass times conditional mass.
Coupling recombine(const Disintegration& d);

// Glues two couplings sharing their first axis: the result conditional at x
// is the product of the two input conditionals. Output axes are
// (shared, left rest..., right rest...).
Coupling glue(const Coupling& left, const Coupling& right);

// One deterministic block: axes (global) and its image per base atom.
struct BlockMap {
  std::vector<int> axes;
  std::map<MultiIndex, MultiIndex> image;
};

// Conditionals of a residual block, placed at the given global axes.
struct ResidualBlock {
  std::vector<int> axes;
  const Disintegration* conditionals = nullptr;
};

// Assembles (prod_j delta_{T_j(x_P)} x residual^{x_P}) (x) base on the full
// product space of `arities`. `base_axes` are the global axes of the base.
Coupling assemble_product_conditional(const Coupling& base, const std::vector<int>& base_axes,
                                      const std::vector<BlockMap>& maps,
                                      const std::optional<ResidualBlock>& residual,
                                      const std::vector<int>& arities);

}  // namespace momt
