#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "momt/instance.hpp"
#include "momt/simplex.hpp"

namespace momt::lp {

inline constexpr double kActiveTolerance = 1e-7;
inline constexpr double kRankTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxCells = 200'000;

struct SolveOptions {
  std::size_t max_cells = kDefaultMaxCells;
  SimplexOptions simplex;
};

struct Solution {
  Coupling plan;
  Potentials potentials;  // canonical gauge
  double value = 0.0;
  double dual_value = 0.0;
  long iterations = 0;
};

// Marginal constraints of the transport polytope. Rows are every atom of
// axis 0 followed by atoms 0..n_k-2 of each later axis; the last atom of
// every axis k >= 1 is implied by the others and has no row.
EqualitySystem transport_system(const std::vector<std::vector<double>>& weights);

// Row of (axis, atom) in transport_system, or -1 for the dropped rows.
int transport_row(const std::vector<int>& arities, int axis, int atom);

// Exact optimum of the Monge-Kantorovich LP: a vertex plan plus potentials
// with zero mu_k-weighted mean on every axis k >= 1.
Solution solve(const DiscreteInstance& instance, const SolveOptions& options = {});

// Optimal plan over the transport polytope restricted to `cells` (linear
// grid indices) for an arbitrary objective, minimized.
Coupling solve_restricted(const DiscreteInstance& instance, const std::vector<std::size_t>& cells,
                          std::span<const double> objective, double* value = nullptr);

// Shifts potentials so that phi_k (k >= 1) has zero mean under mu_k.
void normalize_gauge(Potentials& potentials, const std::vector<std::vector<double>>& weights);

struct StrictPotentials {
  Potentials potentials;  // canonical gauge
  double margin = 0.0;    // least slack off the support, capped at 1
};

// Dual optimum maximizing the least slack of the dual constraint over cells
// outside the support of the optimal `plan`. A positive margin certifies
// that the minimizing set equals the support (and the plan is unique).
StrictPotentials strictly_complementary_potentials(const DiscreteInstance& instance, const Coupling& plan);

struct MinimizingSet {
  std::vector<MultiIndex> indices;  // lexicographic

  bool contains(const MultiIndex& index) const;
};

MinimizingSet minimizing_set(const DiscreteInstance& instance, const Potentials& potentials,
                             double tolerance = kActiveTolerance);

// Sum over the support of the (sense-signed) reduced cost times mass.
double complementary_slackness_gap(const DiscreteInstance& instance, const Coupling& plan,
                                   const Potentials& potentials);

// Rank test: the marginal-constraint columns of the support are linearly
// independent. Throws MarginalMismatch when the plan is not feasible.
bool is_vertex(const Coupling& plan, const std::vector<std::vector<double>>& marginals);

// Same test for a point of an arbitrary equality system.
bool is_vertex(const EqualitySystem& system, std::span<const double> x, double support_floor = 1e-12);

// Numerical rank of the listed columns.
int column_rank(const EqualitySystem& system, const std::vector<int>& columns);

enum class UniquenessStatus { kUnique, kNonUnique, kInconclusive };

std::string_view status_name(UniquenessStatus status);

struct UniquenessCertificate {
  UniquenessStatus status = UniquenessStatus::kInconclusive;
  std::optional<Coupling> witness;
  double face_probe_value_gap = 0.0;
  double witness_distance = 0.0;
  bool witness_from_candidates = false;
};

struct CertificateOptions {
  std::uint64_t seed = 0x6d6f6d74;
  int directions = 2;
  // Dual optimum defining the optimal face; solved for when absent.
  std::optional<Potentials> potentials;
  // Plans tried as explicit witnesses before the probe witness.
  std::vector<Coupling> candidates;
};

UniquenessCertificate uniqueness_certificate(const DiscreteInstance& instance, const Coupling& primal,
                                             double value, const CertificateOptions& options = {});

// Brute-force ground truth: every basic feasible solution of the transport
// polytope, with its objective value. Requires prod n_k <= 81 and
// sum n_k <= 12.
struct OracleVertex {
  Coupling plan;
  double value = 0.0;
};

std::vector<OracleVertex> oracle_enumerate(const DiscreteInstance& instance);

// Best value over oracle_enumerate under the instance sense.
double oracle_optimum(const DiscreteInstance& instance);

struct EnumerationOptions {
  int max_columns = 81;
  std::size_t max_vertices = 100'000;
};

// All vertices of {x >= 0 : A x = b} by depth-first search over supports
// with independent columns, pruned by a feasibility LP. Vertices are
// returned in lexicographic order of their supports.
std::vector<std::vector<double>> enumerate_vertices(const EqualitySystem& system,
                                                    const EnumerationOptions& options = {});

}  // namespace momt::lp
