#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "momt/grid.hpp"
#include "momt/measure.hpp"

namespace momt::costs {

enum class CostKind {
  kTensor,
  kSurplus,
  kAttractive,
  kRepulsive,
  kGangboSwiech,
  kMongeQuadratic,
  kGromovWasserstein,
  kCustom,
};

std::string_view kind_name(CostKind kind);
CostKind kind_from_name(std::string_view name);

// Dense table of cost values over a product grid.
struct CostTensor {
  Grid grid;
  std::vector<double> values;

  double at(std::span<const int> index) const { return values[grid.ravel(index)]; }
};

using CustomCost = std::function<double(std::span<const Point* const>)>;

struct CostSpec {
  CostKind kind = CostKind::kSurplus;
  Sense sense = Sense::kMin;
  // Gromov-Wasserstein parameters: c(x,y) = |x|^2 |y|^2 + xi <A x, y>.
  double xi = 0.0;
  std::vector<std::vector<double>> matrix;
  // Explicit values for kTensor.
  std::shared_ptr<const CostTensor> tensor;
  // Callable for kCustom (library use only, not serializable).
  CustomCost custom;
};

// Checks kind-specific invariants (finite tensor, invertible A, xi != 0).
void validate_spec(const CostSpec& spec, int axes);

// Closed-form evaluation at one point per axis. Not available for kTensor.
double evaluate(const CostSpec& spec, std::span<const Point* const> points);
double evaluate(const CostSpec& spec, const std::vector<Point>& points);

// Tabulates the cost over the product of the given spaces.
CostTensor tabulate(const CostSpec& spec, const std::vector<const Space*>& spaces);

// Sampled convex function u on R^d; its conjugate is a max of affine forms.
struct ConjugateTable {
  std::vector<Point> samples;
  std::vector<double> values;
};

struct ConjugateValue {
  double value = 0.0;
  int argmax = -1;
  bool tied = false;  // another sample attains the max within 1e-12
};

// u*(s) = max_t <s,t> - u(t) over the samples, least index on ties.
ConjugateValue legendre_conjugate(const ConjugateTable& table, std::span<const double> s);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

}  // namespace momt::costs
