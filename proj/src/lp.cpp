#include "momt/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "momt/error.hpp"

namespace momt::lp {

int transport_row(const std::vector<int>& arities, int axis, int atom) {
  if (axis == 0) return atom;
  if (atom == arities[axis] - 1) return -1;
  int row = arities[0];
  for (int k = 1; k < axis; ++k) row += arities[k] - 1;
  return row + atom;
}

namespace {

std::vector<int> arities_of(const std::vector<std::vector<double>>& weights) {
  std::vector<int> out;
  for (const auto& w : weights) out.push_back(static_cast<int>(w.size()));
  return out;
}

SparseColumn transport_column(const std::vector<int>& arities, const MultiIndex& index) {
  SparseColumn col;
  for (std::size_t k = 0; k < arities.size(); ++k) {
    const int row = transport_row(arities, static_cast<int>(k), index[k]);
    if (row >= 0) {
      col.rows.push_back(row);
      col.coeffs.push_back(1.0);
    }
  }
  return col;
}

EqualitySystem transport_rows(const std::vector<std::vector<double>>& weights) {
  const std::vector<int> arities = arities_of(weights);
  EqualitySystem system;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (int i = 0; i < arities[k]; ++i) {
      if (transport_row(arities, static_cast<int>(k), i) >= 0) system.rhs.push_back(weights[k][i]);
    }
  }
  system.rows = static_cast<int>(system.rhs.size());
  return system;
}

double sense_sign(Sense sense) { return sense == Sense::kMin ? 1.0 : -1.0; }

}  // namespace

EqualitySystem transport_system(const std::vector<std::vector<double>>& weights) {
  EqualitySystem system = transport_rows(weights);
  const std::vector<int> arities = arities_of(weights);
  const Grid grid(arities);
  system.columns.reserve(grid.size());
  MultiIndex index(arities.size(), 0);
  do {
    system.columns.push_back(transport_column(arities, index));
  } while (grid.next(index));
  return system;
}

void normalize_gauge(Potentials& potentials, const std::vector<std::vector<double>>& weights) {
  double shift = 0.0;
  for (std::size_t k = 1; k < potentials.vectors.size(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < weights[k].size(); ++i) mean += weights[k][i] * potentials.vectors[k][i];
    for (double& v : potentials.vectors[k]) v -= mean;
    shift += mean;
  }
  if (!potentials.vectors.empty()) {
    for (double& v : potentials.vectors[0]) v += shift;
  }
}

Solution solve(const DiscreteInstance& instance, const SolveOptions& options) {
  const Grid& grid = instance.grid();
  if (grid.size() > options.max_cells) {
    throw Error(ErrorCode::kInstanceTooLarge, "grid has " + std::to_string(grid.size()) +
                                                  " cells, cap is " + std::to_string(options.max_cells));
  }
  for (double v : instance.table().values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteCost, "cost table has a non-finite entry");
  }
  const auto weights = instance.weights();
  const std::vector<int> arities = instance.arities();
  const EqualitySystem system = transport_system(weights);
  const double sign = sense_sign(instance.sense());
  std::vector<double> cost(instance.table().values);
  for (double& c : cost) c *= sign;

  const SimplexResult lp = solve_standard_form(system, cost, options.simplex);

  Solution out;
  out.iterations = lp.iterations;
  out.plan = Coupling(arities);
  for (std::size_t j = 0; j < lp.x.size(); ++j) {
    if (lp.x[j] > 0.0) out.plan.add(grid.unravel(j), lp.x[j]);
  }
  out.potentials.vectors.resize(arities.size());
  for (std::size_t k = 0; k < arities.size(); ++k) {
    out.potentials.vectors[k].assign(arities[k], 0.0);
    for (int i = 0; i < arities[k]; ++i) {
      const int row = transport_row(arities, static_cast<int>(k), i);
      if (row >= 0) out.potentials.vectors[k][i] = sign * lp.duals[row];
    }
  }
  normalize_gauge(out.potentials, weights);
  out.value = instance.plan_cost(out.plan);
  out.dual_value = out.potentials.dual_value(weights);
  return out;
}

Coupling solve_restricted(const DiscreteInstance& instance, const std::vector<std::size_t>& cells,
                          std::span<const double> objective, double* value) {
  const auto weights = instance.weights();
  const std::vector<int> arities = instance.arities();
  EqualitySystem system = transport_rows(weights);
  for (std::size_t cell : cells) system.columns.push_back(transport_column(arities, instance.grid().unravel(cell)));
  const SimplexResult lp = solve_standard_form(system, objective);
  Coupling plan(arities);
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (lp.x[j] > 0.0) plan.add(instance.grid().unravel(cells[j]), lp.x[j]);
  }
  if (value != nullptr) *value = lp.objective;
  return plan;
}

StrictPotentials strictly_complementary_potentials(const DiscreteInstance& instance, const Coupling& plan) {
  // Primal of: max eps s.t. sum phi + eps <= c off the support, sum phi = c
  // on it, eps <= 1. Its row duals are (phi, eps).
  const auto arities = instance.arities();
  const Grid& grid = instance.grid();
  const int n = static_cast<int>(arities.size());
  std::vector<int> offset(n, 0);
  for (int k = 1; k < n; ++k) offset[k] = offset[k - 1] + arities[k - 1];
  const int eps_row = offset[n - 1] + arities[n - 1];
  EqualitySystem system;
  system.rows = eps_row + 1;
  system.rhs.assign(system.rows, 0.0);
  system.rhs[eps_row] = 1.0;
  std::vector<double> cost;
  const double sign = sense_sign(instance.sense());
  MultiIndex index(n, 0);
  do {
    SparseColumn col;
    for (int k = 0; k < n; ++k) {
      col.rows.push_back(offset[k] + index[k]);
      col.coeffs.push_back(1.0);
    }
    const double c = sign * instance.cost_at(index);
    if (plan.mass(index) > 0.0) {
      SparseColumn neg = col;
      for (double& v : neg.coeffs) v = -1.0;
      system.columns.push_back(std::move(col));
      cost.push_back(c);
      system.columns.push_back(std::move(neg));
      cost.push_back(-c);
    } else {
      col.rows.push_back(eps_row);
      col.coeffs.push_back(1.0);
      system.columns.push_back(std::move(col));
      cost.push_back(c);
    }
  } while (grid.next(index));
  system.columns.push_back({{eps_row}, {1.0}});
  cost.push_back(1.0);

  const SimplexResult lp = solve_standard_form(system, cost);
  StrictPotentials out;
  out.potentials.vectors.resize(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < arities[k]; ++i) out.potentials.vectors[k].push_back(sign * lp.duals[offset[k] + i]);
  }
  normalize_gauge(out.potentials, instance.weights());
  out.margin = lp.duals[eps_row];
  return out;
}

bool MinimizingSet::contains(const MultiIndex& index) const {
  return std::binary_search(indices.begin(), indices.end(), index);
}

MinimizingSet minimizing_set(const DiscreteInstance& instance, const Potentials& potentials, double tolerance) {
  MinimizingSet out;
  const Grid& grid = instance.grid();
  MultiIndex index(grid.axes(), 0);
  do {
    if (std::abs(instance.cost_at(index) - potentials.sum_at(index)) <= tolerance) out.indices.push_back(index);
  } while (grid.next(index));
  return out;
}

double complementary_slackness_gap(const DiscreteInstance& instance, const Coupling& plan,
                                   const Potentials& potentials) {
  const double sign = sense_sign(instance.sense());
  double gap = 0.0;
  for (const auto& [index, mass] : plan.entries()) {
    gap += sign * (instance.cost_at(index) - potentials.sum_at(index)) * mass;
  }
  return gap;
}

int column_rank(const EqualitySystem& system, const std::vector<int>& columns) {
  if (columns.empty()) return 0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(system.rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const SparseColumn& col = system.columns[columns[c]];
    for (std::size_t e = 0; e < col.rows.size(); ++e) a(col.rows[e], static_cast<Eigen::Index>(c)) = col.coeffs[e];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(kRankTolerance);
  return static_cast<int>(lu.rank());
}

bool is_vertex(const Coupling& plan, const std::vector<std::vector<double>>& marginals) {
  const std::vector<int> arities = arities_of(marginals);
  if (plan.arities() != arities) {
    throw Error(ErrorCode::kMarginalMismatch, "plan arities differ from the marginals");
  }
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    const auto m = plan.axis_marginal(static_cast<int>(k));
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double dev = std::abs(m[i] - marginals[k][i]);
      if (dev > kGluingTolerance) {
        throw Error(ErrorCode::kMarginalMismatch,
                    "axis " + std::to_string(k) + " deviates by " + std::to_string(dev));
      }
    }
  }
  EqualitySystem system = transport_rows(marginals);
  std::vector<int> columns;
  for (const auto& [index, mass] : plan.entries()) {
    columns.push_back(static_cast<int>(system.columns.size()));
    system.columns.push_back(transport_column(arities, index));
  }
  return column_rank(system, columns) == static_cast<int>(columns.size());
}

bool is_vertex(const EqualitySystem& system, std::span<const double> x, double support_floor) {
  std::vector<int> columns;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] > support_floor) columns.push_back(static_cast<int>(j));
  }
  return column_rank(system, columns) == static_cast<int>(columns.size());
}

std::string_view status_name(UniquenessStatus status) {
  switch (status) {
    case UniquenessStatus::kUnique:
      return "unique";
    case UniquenessStatus::kNonUnique:
      return "non-unique";
    case UniquenessStatus::kInconclusive:
      break;
  }
  return "inconclusive";
}

namespace {

bool is_optimal_witness(const DiscreteInstance& instance, const Coupling& plan, double value) {
  if (plan.arities() != instance.arities()) return false;
  if (marginal_deviation(instance, plan) > 1e-9) return false;
  return std::abs(instance.plan_cost(plan) - value) <= 1e-8 * std::max(1.0, std::abs(value));
}

}  // namespace

UniquenessCertificate uniqueness_certificate(const DiscreteInstance& instance, const Coupling& primal,
                                             double value, const CertificateOptions& options) {
  Potentials potentials = options.potentials ? *options.potentials : solve(instance).potentials;
  const Grid& grid = instance.grid();
  const double sign = sense_sign(instance.sense());

  // Optimal face: cells with zero reduced cost. The tolerance is relative
  // to the cost scale and far below any genuine cost gap.
  double scale = 1.0;
  for (double v : instance.table().values) scale = std::max(scale, std::abs(v));
  std::vector<std::size_t> face;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const MultiIndex index = grid.unravel(cell);
    if (sign * (instance.cost_at(index) - potentials.sum_at(index)) <= 1e-9 * scale) face.push_back(cell);
  }

  UniquenessCertificate cert;
  std::vector<Coupling> probes;
  for (int d = 0; d < options.directions; ++d) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(d));
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> direction(face.size());
    for (double& r : direction) r = uniform(rng);
    double low = 0.0;
    double high = 0.0;
    probes.push_back(solve_restricted(instance, face, direction, &low));
    for (double& r : direction) r = -r;
    probes.push_back(solve_restricted(instance, face, direction, &high));
    cert.face_probe_value_gap = std::max(cert.face_probe_value_gap, -high - low);
  }

  double farthest = 0.0;
  const Coupling* far_plan = nullptr;
  for (const Coupling& p : probes) {
    const double tv = total_variation(p, primal);
    if (tv > farthest) {
      farthest = tv;
      far_plan = &p;
    }
  }

  for (const Coupling& candidate : options.candidates) {
    const double tv = total_variation(candidate, primal);
    if (tv > 1e-6 && is_optimal_witness(instance, candidate, value)) {
      cert.status = UniquenessStatus::kNonUnique;
      cert.witness = candidate;
      cert.witness_distance = tv;
      cert.witness_from_candidates = true;
      return cert;
    }
  }

  if (farthest <= 1e-8) {
    cert.status = UniquenessStatus::kUnique;
  } else if (farthest > 1e-6 && is_optimal_witness(instance, *far_plan, value)) {
    cert.status = UniquenessStatus::kNonUnique;
    cert.witness = *far_plan;
    cert.witness_distance = farthest;
  } else {
    cert.status = UniquenessStatus::kInconclusive;
    cert.witness_distance = farthest;
  }
  return cert;
}

}  // namespace momt::lp
