#include "momt/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "momt/error.hpp"

namespace momt::lp {

namespace {

// Revised simplex on {A x = b, x >= 0} with b >= 0. Columns at index >= n are
// artificial unit columns e_{j-n}; they never re-enter once they leave.
class RevisedSimplex {
 public:
  RevisedSimplex(const EqualitySystem& system, const SimplexOptions& options)
      : system_(system), options_(options), m_(system.rows), n_(system.cols()) {
    is_basic_.assign(n_ + m_, false);
  }

  void set_basis(std::vector<int> basis) {
    basis_ = std::move(basis);
    std::fill(is_basic_.begin(), is_basic_.end(), false);
    for (int j : basis_) is_basic_[j] = true;
    refactor();
  }

  // Runs simplex iterations with the given cost over all n + m columns.
  void optimize(const std::vector<double>& cost) {
    double scale = 1.0;
    for (double c : cost) scale = std::max(scale, std::abs(c));
    const double tol = options_.pricing_tolerance * scale;
    Eigen::VectorXd y(m_);
    Eigen::VectorXd u(m_);
    int since_refactor = 0;
    while (true) {
      if (iterations_ >= options_.max_iterations) {
        throw Error(ErrorCode::kIterationLimit, "simplex iteration limit reached");
      }
      for (int r = 0; r < m_; ++r) {
        double s = 0.0;
        for (int i = 0; i < m_; ++i) s += cost[basis_[i]] * binv_(i, r);
        y[r] = s;
      }
      int entering = -1;
      for (int j = 0; j < n_; ++j) {
        if (is_basic_[j]) continue;
        const SparseColumn& col = system_.columns[j];
        double d = cost[j];
        for (std::size_t e = 0; e < col.rows.size(); ++e) d -= y[col.rows[e]] * col.coeffs[e];
        if (d < -tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;

      column_times_binv(entering, u);
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (u[i] <= options_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, xb_[i]) / u[i];
        const double slack = 1e-14 * (1.0 + ratio);
        if (leave < 0 || ratio < best_ratio - slack) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio <= best_ratio + slack && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) throw Error(ErrorCode::kUnbounded, "linear program is unbounded");
      pivot(entering, leave, u);
      ++iterations_;
      if (++since_refactor >= options_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  // Pivots basic artificials out where some structural column has a
  // nonzero entry in their row; returns rows that stay artificial.
  std::vector<int> drive_out_artificials() {
    std::vector<int> redundant;
    Eigen::VectorXd u(m_);
    for (int p = 0; p < m_; ++p) {
      if (basis_[p] < n_) continue;
      int found = -1;
      for (int j = 0; j < n_ && found < 0; ++j) {
        if (is_basic_[j]) continue;
        const SparseColumn& col = system_.columns[j];
        double alpha = 0.0;
        for (std::size_t e = 0; e < col.rows.size(); ++e) alpha += binv_(p, col.rows[e]) * col.coeffs[e];
        if (std::abs(alpha) > options_.pivot_tolerance) found = j;
      }
      if (found >= 0) {
        column_times_binv(found, u);
        pivot(found, p, u);
      } else {
        redundant.push_back(basis_[p] - n_);
      }
    }
    refactor();
    return redundant;
  }

  const std::vector<int>& basis() const { return basis_; }
  const Eigen::VectorXd& basic_values() const { return xb_; }
  const Eigen::MatrixXd& basis_inverse() const { return binv_; }
  long iterations() const { return iterations_; }

 private:
  void column_times_binv(int j, Eigen::VectorXd& out) const {
    if (j >= n_) {
      out = binv_.col(j - n_);
      return;
    }
    out.setZero();
    const SparseColumn& col = system_.columns[j];
    for (std::size_t e = 0; e < col.rows.size(); ++e) out += binv_.col(col.rows[e]) * col.coeffs[e];
  }

  void pivot(int entering, int leave, const Eigen::VectorXd& u) {
    const double up = u[leave];
    const double theta = xb_[leave] / up;
    for (int i = 0; i < m_; ++i) {
      if (i != leave) xb_[i] -= theta * u[i];
    }
    xb_[leave] = theta;
    binv_.row(leave) /= up;
    for (int i = 0; i < m_; ++i) {
      if (i != leave && u[i] != 0.0) binv_.row(i) -= u[i] * binv_.row(leave);
    }
    is_basic_[basis_[leave]] = false;
    is_basic_[entering] = true;
    basis_[leave] = entering;
  }

  void refactor() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[i];
      if (j >= n_) {
        b(j - n_, i) = 1.0;
        continue;
      }
      const SparseColumn& col = system_.columns[j];
      for (std::size_t e = 0; e < col.rows.size(); ++e) b(col.rows[e], i) = col.coeffs[e];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) throw Error(ErrorCode::kSingularMatrix, "simplex basis became singular");
    binv_ = lu.inverse();
    Eigen::VectorXd rhs(m_);
    for (int r = 0; r < m_; ++r) rhs[r] = system_.rhs[r];
    xb_ = binv_ * rhs;
  }

  const EqualitySystem& system_;
  const SimplexOptions& options_;
  int m_;
  int n_;
  std::vector<int> basis_;
  std::vector<bool> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  long iterations_ = 0;
};

EqualitySystem drop_rows(const EqualitySystem& system, const std::vector<int>& rows,
                         std::vector<int>& kept) {
  std::vector<int> position(system.rows, -1);
  kept.clear();
  for (int r = 0; r < system.rows; ++r) {
    if (std::find(rows.begin(), rows.end(), r) == rows.end()) {
      position[r] = static_cast<int>(kept.size());
      kept.push_back(r);
    }
  }
  EqualitySystem out;
  out.rows = static_cast<int>(kept.size());
  for (int r : kept) out.rhs.push_back(system.rhs[r]);
  out.columns.resize(system.columns.size());
  for (std::size_t j = 0; j < system.columns.size(); ++j) {
    const SparseColumn& col = system.columns[j];
    for (std::size_t e = 0; e < col.rows.size(); ++e) {
      if (position[col.rows[e]] >= 0) {
        out.columns[j].rows.push_back(position[col.rows[e]]);
        out.columns[j].coeffs.push_back(col.coeffs[e]);
      }
    }
  }
  return out;
}

}  // namespace

SimplexResult solve_standard_form(const EqualitySystem& input, std::span<const double> cost,
                                  const SimplexOptions& options) {
  const int n = input.cols();
  if (static_cast<int>(cost.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "cost length differs from column count");
  }
  for (double c : cost) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kNonFiniteCost, "non-finite objective coefficient");
  }

  // Flip rows so that b >= 0; duals are flipped back at the end.
  EqualitySystem system = input;
  std::vector<double> row_sign(system.rows, 1.0);
  for (int r = 0; r < system.rows; ++r) {
    if (system.rhs[r] < 0.0) {
      row_sign[r] = -1.0;
      system.rhs[r] = -system.rhs[r];
    }
  }
  for (auto& col : system.columns) {
    for (std::size_t e = 0; e < col.rows.size(); ++e) col.coeffs[e] *= row_sign[col.rows[e]];
  }

  SimplexResult result;
  result.x.assign(n, 0.0);
  result.duals.assign(input.rows, 0.0);
  if (system.rows == 0) return result;

  // Phase 1: artificial basis, minimize the artificial total.
  RevisedSimplex phase1(system, options);
  std::vector<int> basis(system.rows);
  for (int r = 0; r < system.rows; ++r) basis[r] = n + r;
  phase1.set_basis(basis);
  std::vector<double> phase1_cost(n + system.rows, 0.0);
  for (int r = 0; r < system.rows; ++r) phase1_cost[n + r] = 1.0;
  phase1.optimize(phase1_cost);
  double infeasibility = 0.0;
  for (int i = 0; i < system.rows; ++i) {
    if (phase1.basis()[i] >= n) infeasibility += phase1.basic_values()[i];
  }
  double rhs_scale = 1.0;
  for (double b : system.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
  if (infeasibility > options.feasibility_tolerance * rhs_scale) {
    throw Error(ErrorCode::kInfeasible, "equality system has no nonnegative solution");
  }
  const std::vector<int> redundant = phase1.drive_out_artificials();
  long iterations = phase1.iterations();

  std::vector<int> kept;
  const EqualitySystem reduced = drop_rows(system, redundant, kept);
  std::vector<int> structural;
  for (int j : phase1.basis()) {
    if (j < n) structural.push_back(j);
  }

  std::vector<double> phase2_cost(n + reduced.rows, 0.0);
  std::copy(cost.begin(), cost.end(), phase2_cost.begin());
  RevisedSimplex phase2(reduced, options);
  phase2.set_basis(structural);
  phase2.optimize(phase2_cost);
  iterations += phase2.iterations();

  const auto& final_basis = phase2.basis();
  const Eigen::VectorXd& xb = phase2.basic_values();
  for (int i = 0; i < reduced.rows; ++i) result.x[final_basis[i]] = std::max(0.0, xb[i]);
  result.basis = final_basis;
  std::sort(result.basis.begin(), result.basis.end());
  const Eigen::MatrixXd& binv = phase2.basis_inverse();
  for (int r = 0; r < reduced.rows; ++r) {
    double s = 0.0;
    for (int i = 0; i < reduced.rows; ++i) s += cost[final_basis[i]] * binv(i, r);
    result.duals[kept[r]] = s * row_sign[kept[r]];
  }
  for (int j = 0; j < n; ++j) result.objective += cost[j] * result.x[j];
  result.iterations = iterations;
  return result;
}

}  // namespace momt::lp
