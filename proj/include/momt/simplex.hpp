#pragma once

#include <span>
#include <vector>

namespace momt::lp {

struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> coeffs;
};

// Equality-form polyhedron {x >= 0 : A x = b}, stored by columns.
struct EqualitySystem {
  int rows = 0;
  std::vector<double> rhs;
  std::vector<SparseColumn> columns;

  int cols() const { return static_cast<int>(columns.size()); }
};

struct SimplexOptions {
  double pricing_tolerance = 1e-10;  // scaled by max(1, max |c|)
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  long max_iterations = 5'000'000;
  int refactor_interval = 64;
};

struct SimplexResult {
  std::vector<double> x;      // one entry per column
  std::vector<double> duals;  // one entry per row; zero on rows found redundant
  std::vector<int> basis;     // structural basic columns
  double objective = 0.0;
  long iterations = 0;
};

// Minimizes cost . x over the system with a two-phase revised simplex.
// Bland's rule (least index) selects both the entering and leaving
// variable, so the method terminates on degenerate problems and returns a
// basic (vertex) solution.
SimplexResult solve_standard_form(const EqualitySystem& system, std::span<const double> cost,
                                  const SimplexOptions& options = {});

}  // namespace momt::lp
