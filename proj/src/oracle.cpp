// Exhaustive vertex enumeration used as ground truth for the solver. It
// deliberately shares no code with the revised simplex: supports are grown
// depth-first and pruned with a small dense-tableau phase-1 of its own.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "momt/error.hpp"
#include "momt/lp.hpp"

namespace momt::lp {

namespace {

// Phase-1 simplex on a dense tableau: is {x >= 0 : A x = b} nonempty?
bool tableau_feasible(const Eigen::MatrixXd& a, Eigen::VectorXd b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = s * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = s * b[i];
  }
  std::vector<Eigen::Index> basis(m);
  std::iota(basis.begin(), basis.end(), n);
  // Reduced costs of the artificial objective.
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) r.head(n) -= t.row(i).head(n);
  for (Eigen::Index i = 0; i < m; ++i) r[n + m] -= t(i, n + m);

  constexpr double kTol = 1e-11;
  for (int iter = 0; iter < 100000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (r[j] < -kTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) <= kTol) continue;
      const double ratio = t(i, n + m) / t(i, enter);
      if (leave < 0 || ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // cannot happen for a bounded phase-1
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i != leave) t.row(i) -= t(i, enter) * t.row(leave);
    }
    r -= r[enter] * t.row(leave);
    basis[leave] = enter;
  }
  return -r[n + m] <= 1e-10 * (1.0 + b.cwiseAbs().maxCoeff());
}

class VertexSearch {
 public:
  VertexSearch(const EqualitySystem& system, const EnumerationOptions& options)
      : options_(options), a_(Eigen::MatrixXd::Zero(system.rows, system.cols())), b_(system.rows) {
    for (int j = 0; j < system.cols(); ++j) {
      const SparseColumn& col = system.columns[j];
      for (std::size_t e = 0; e < col.rows.size(); ++e) a_(col.rows[e], j) = col.coeffs[e];
    }
    for (int i = 0; i < system.rows; ++i) b_[i] = system.rhs[i];
    epsilon_ = 1e-9 * std::max(1.0, b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
  }

  std::vector<std::vector<double>> run() {
    std::vector<int> chosen;
    visit(0, chosen);
    return std::move(vertices_);
  }

 private:
  // Some feasible point is >= epsilon on `chosen` and vanishes on every
  // skipped column before `pos`.
  bool feasible(int pos, const std::vector<int>& chosen) const {
    std::vector<int> allowed = chosen;
    for (int j = pos; j < a_.cols(); ++j) allowed.push_back(j);
    Eigen::MatrixXd sub(a_.rows(), static_cast<Eigen::Index>(allowed.size()));
    for (std::size_t c = 0; c < allowed.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a_.col(allowed[c]);
    Eigen::VectorXd shifted = b_;
    for (int j : chosen) shifted -= epsilon_ * a_.col(j);
    return tableau_feasible(sub, shifted);
  }

  Eigen::MatrixXd columns(const std::vector<int>& chosen) const {
    Eigen::MatrixXd sub(a_.rows(), static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t c = 0; c < chosen.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a_.col(chosen[c]);
    return sub;
  }

  bool independent(const std::vector<int>& chosen) const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(columns(chosen));
    lu.setThreshold(kRankTolerance);
    return lu.rank() == static_cast<Eigen::Index>(chosen.size());
  }

  void visit(int pos, std::vector<int>& chosen) {
    if (!feasible(pos, chosen)) return;
    if (!chosen.empty()) {
      const Eigen::MatrixXd sub = columns(chosen);
      const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(b_);
      if ((sub * x - b_).norm() <= 1e-9 * (1.0 + b_.norm())) {
        // b is spanned, so every independent superset has the same solution.
        if (x.minCoeff() > 1e-12) record(chosen, x);
        return;
      }
    }
    if (pos == a_.cols()) return;
    chosen.push_back(pos);
    if (independent(chosen)) visit(pos + 1, chosen);
    chosen.pop_back();
    visit(pos + 1, chosen);
  }

  void record(const std::vector<int>& chosen, const Eigen::VectorXd& x) {
    if (vertices_.size() >= options_.max_vertices) {
      throw Error(ErrorCode::kInstanceTooLarge, "vertex enumeration exceeded its cap");
    }
    std::vector<double> v(a_.cols(), 0.0);
    for (std::size_t c = 0; c < chosen.size(); ++c) v[chosen[c]] = x[static_cast<Eigen::Index>(c)];
    vertices_.push_back(std::move(v));
  }

  const EnumerationOptions& options_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double epsilon_ = 0.0;
  std::vector<std::vector<double>> vertices_;
};

}  // namespace

std::vector<std::vector<double>> enumerate_vertices(const EqualitySystem& system,
                                                    const EnumerationOptions& options) {
  if (system.cols() > options.max_columns) {
    throw Error(ErrorCode::kInstanceTooLarge, "vertex enumeration is capped at " +
                                                  std::to_string(options.max_columns) + " columns");
  }
  bool zero_rhs = true;
  for (double b : system.rhs) zero_rhs = zero_rhs && b == 0.0;
  if (zero_rhs) return {std::vector<double>(system.cols(), 0.0)};
  return VertexSearch(system, options).run();
}

std::vector<OracleVertex> oracle_enumerate(const DiscreteInstance& instance) {
  const std::vector<int> arities = instance.arities();
  const int total = std::accumulate(arities.begin(), arities.end(), 0);
  if (instance.grid().size() > 81 || total > 12) {
    throw Error(ErrorCode::kInstanceTooLarge, "oracle needs prod n_k <= 81 and sum n_k <= 12");
  }
  const EqualitySystem system = transport_system(instance.weights());
  std::vector<OracleVertex> out;
  for (const auto& x : enumerate_vertices(system)) {
    OracleVertex v{Coupling(arities), 0.0};
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] > 0.0) v.plan.add(instance.grid().unravel(j), x[j]);
    }
    v.value = instance.plan_cost(v.plan);
    out.push_back(std::move(v));
  }
  return out;
}

double oracle_optimum(const DiscreteInstance& instance) {
  const auto vertices = oracle_enumerate(instance);
  if (vertices.empty()) throw Error(ErrorCode::kInfeasible, "transport polytope has no vertex");
  double best = vertices.front().value;
  for (const auto& v : vertices) {
    best = instance.sense() == Sense::kMin ? std::min(best, v.value) : std::max(best, v.value);
  }
  return best;
}

}  // namespace momt::lp
