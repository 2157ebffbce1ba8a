#include "momt/extremality.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include "momt/error.hpp"

namespace momt::extremality {

namespace {

// Tries every tuple of per-axis permutations on one set of points.
class CycleTester {
 public:
  CycleTester(const costs::CostTensor& cost, Sense sense) : cost_(cost), sense_(sense) {}

  std::optional<CycleViolation> test(const std::vector<MultiIndex>& points, long& checked) {
    points_ = &points;
    original_ = 0.0;
    for (const auto& p : points) original_ += cost_.at(p);
    const int axes = static_cast<int>(points.front().size());
    perms_.assign(axes - 1, std::vector<int>(points.size()));
    for (auto& p : perms_) std::iota(p.begin(), p.end(), 0);
    checked_ = &checked;
    if (axes < 2) return std::nullopt;
    return recurse(0);
  }

  std::optional<CycleViolation> test_one(const std::vector<MultiIndex>& points,
                                         const std::vector<std::vector<int>>& perms) {
    points_ = &points;
    perms_ = perms;
    original_ = 0.0;
    for (const auto& p : points) original_ += cost_.at(p);
    return evaluate();
  }

 private:
  std::optional<CycleViolation> recurse(std::size_t axis) {
    if (axis == perms_.size()) {
      ++*checked_;
      return evaluate();
    }
    std::vector<int>& p = perms_[axis];
    std::iota(p.begin(), p.end(), 0);
    do {
      if (auto v = recurse(axis + 1)) return v;
    } while (std::next_permutation(p.begin(), p.end()));
    std::iota(p.begin(), p.end(), 0);
    return std::nullopt;
  }

  std::optional<CycleViolation> evaluate() {
    const auto& pts = *points_;
    double permuted = 0.0;
    MultiIndex tuple(pts.front().size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      tuple[0] = pts[i][0];
      for (std::size_t k = 0; k < perms_.size(); ++k) tuple[k + 1] = pts[perms_[k][i]][k + 1];
      permuted += cost_.at(tuple);
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(original_));
    const bool better = sense_ == Sense::kMin ? permuted < original_ - tol : permuted > original_ + tol;
    if (!better) return std::nullopt;
    return CycleViolation{pts, perms_, original_, permuted};
  }

  const costs::CostTensor& cost_;
  Sense sense_;
  const std::vector<MultiIndex>* points_ = nullptr;
  std::vector<std::vector<int>> perms_;
  double original_ = 0.0;
  long* checked_ = nullptr;
};

void combinations(int n, int k, int start, std::vector<int>& current,
                  const std::function<bool(const std::vector<int>&)>& visit, bool& stop) {
  if (stop) return;
  if (static_cast<int>(current.size()) == k) {
    stop = visit(current);
    return;
  }
  for (int i = start; i < n && !stop; ++i) {
    current.push_back(i);
    combinations(n, k, i + 1, current, visit, stop);
    current.pop_back();
  }
}

}  // namespace

MonotonicityResult check_cyclical_monotonicity(const std::vector<MultiIndex>& support,
                                               const costs::CostTensor& cost, Sense sense, int max_cycle,
                                               int samples, std::uint64_t seed) {
  if (max_cycle < 2) throw Error(ErrorCode::kInvalidArgument, "maxCycle must be at least 2");
  MonotonicityResult result;
  CycleTester tester(cost, sense);
  const int n = static_cast<int>(support.size());
  for (int m = 2; m <= std::min(max_cycle, n); ++m) {
    std::vector<int> current;
    bool stop = false;
    combinations(n, m, 0, current, [&](const std::vector<int>& chosen) {
      std::vector<MultiIndex> points;
      for (int i : chosen) points.push_back(support[i]);
      if (auto v = tester.test(points, result.cycles_checked)) {
        result.violation = std::move(v);
        return true;
      }
      return false;
    }, stop);
    if (stop) {
      result.pass = false;
      return result;
    }
  }
  if (samples > 0 && n > max_cycle) {
    std::mt19937_64 rng(seed);
    const int axes = static_cast<int>(support.front().size());
    std::vector<int> order(n);
    for (int s = 0; s < samples; ++s) {
      const int upper = std::min(n, max_cycle + 3);
      const int m = std::uniform_int_distribution<int>(max_cycle + 1, upper)(rng);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<MultiIndex> points;
      for (int i = 0; i < m; ++i) points.push_back(support[order[i]]);
      std::vector<std::vector<int>> perms(axes - 1, std::vector<int>(m));
      for (auto& p : perms) {
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
      }
      ++result.cycles_checked;
      if (auto v = tester.test_one(points, perms)) {
        result.pass = false;
        result.violation = std::move(v);
        return result;
      }
    }
  }
  return result;
}

std::size_t FiberReport::max_fiber() const {
  std::size_t m = 0;
  for (const auto& a : atoms) m = std::max(m, a.fiber.size());
  return m;
}

FiberReport fiber_report(const std::vector<MultiIndex>& support, const costs::CostTensor& cost,
                         const std::vector<int>& first_axes, const std::optional<OrderedPartition>& partition) {
  FiberReport report;
  report.first_axes = first_axes;
  const int axes = cost.grid.axes();
  report.second_axes = complement_axes(first_axes, axes);
  if (report.second_axes.empty() || first_axes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "split must leave both blocks nonempty");
  }

  std::map<MultiIndex, int> block_of;
  if (partition) {
    for (std::size_t b = 0; b < partition->blocks.size(); ++b) {
      for (const auto& y : partition->blocks[b]) {
        if (!block_of.emplace(y, static_cast<int>(b)).second) {
          throw Error(ErrorCode::kInvalidArgument, "partition blocks overlap");
        }
      }
    }
  }

  std::map<MultiIndex, std::vector<MultiIndex>> fibers;
  for (const auto& index : support) {
    auto& f = fibers[project_index(index, first_axes)];
    f.push_back(project_index(index, report.second_axes));
  }
  MultiIndex full(axes);
  auto value_at = [&](const MultiIndex& x, const MultiIndex& y) {
    for (std::size_t i = 0; i < x.size(); ++i) full[first_axes[i]] = x[i];
    for (std::size_t i = 0; i < y.size(); ++i) full[report.second_axes[i]] = y[i];
    return cost.at(full);
  };

  for (auto& [x, fiber] : fibers) {
    std::sort(fiber.begin(), fiber.end());
    fiber.erase(std::unique(fiber.begin(), fiber.end()), fiber.end());
    FiberEntry entry{x, fiber, {}, std::nullopt};
    std::vector<MultiIndex> candidates = fiber;
    if (partition) {
      int least = static_cast<int>(partition->blocks.size());
      for (const auto& y : fiber) {
        auto it = block_of.find(y);
        if (it == block_of.end()) throw Error(ErrorCode::kInvalidArgument, "partition does not cover a fiber atom");
        least = std::min(least, it->second);
      }
      entry.block = least;
      std::erase_if(candidates, [&](const MultiIndex& y) { return block_of[y] != least; });
    }
    double best = -INFINITY;
    for (const auto& y : candidates) best = std::max(best, value_at(x, y));
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    for (const auto& y : candidates) {
      if (value_at(x, y) >= best - tol) entry.argmax.push_back(y);
    }
    report.atoms.push_back(std::move(entry));
  }
  return report;
}

ExtremeResult check_c_extreme(const FiberReport& report) {
  ExtremeResult result;
  const auto& atoms = report.atoms;
  for (const auto& a : atoms) {
    if (!a.fiber.empty() && a.argmax.empty()) {
      throw Error(ErrorCode::kInvariantViolation, "nonempty fiber without an argmax");
    }
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      // A shared atom violates (ii) if some selection keeps it on both sides.
      std::vector<MultiIndex> shared;
      std::set_intersection(atoms[i].fiber.begin(), atoms[i].fiber.end(), atoms[j].fiber.begin(),
                            atoms[j].fiber.end(), std::back_inserter(shared));
      for (const auto& y : shared) {
        for (const auto& y1 : atoms[i].argmax) {
          for (const auto& y2 : atoms[j].argmax) {
            if (y != y1 && y != y2) {
              result.pass = false;
              result.violation = ExtremeViolation{atoms[i].x, atoms[j].x, y};
              return result;
            }
          }
        }
      }
    }
  }
  return result;
}

DecompositionResult detect_map_decomposition(const Coupling& plan, int first_axis, int max_maps) {
  DecompositionResult result;
  const int axes = plan.axes();
  const std::vector<int> first{first_axis};
  const std::vector<int> rest = complement_axes(first, axes);
  const int n = plan.arities().at(first_axis);
  std::vector<std::vector<std::pair<MultiIndex, double>>> fibers(n);
  for (const auto& [index, mass] : plan.entries()) {
    fibers[index[first_axis]].emplace_back(project_index(index, rest), mass);
  }
  for (auto& f : fibers) {
    std::stable_sort(f.begin(), f.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    result.max_fiber = std::max(result.max_fiber, static_cast<int>(f.size()));
  }
  if (result.max_fiber > max_maps) {
    result.decomposable = false;
    return result;
  }
  MapDecomposition& d = result.decomposition;
  d.first_axis = first_axis;
  d.maps.assign(result.max_fiber, std::vector<MultiIndex>(n));
  d.weights.assign(result.max_fiber, std::vector<double>(n, 0.0));
  for (int x = 0; x < n; ++x) {
    double total = 0.0;
    for (const auto& e : fibers[x]) total += e.second;
    for (int k = 0; k < result.max_fiber; ++k) {
      if (k < static_cast<int>(fibers[x].size())) {
        d.maps[k][x] = fibers[x][k].first;
        d.weights[k][x] = fibers[x][k].second / total;
      } else if (!fibers[x].empty()) {
        d.maps[k][x] = fibers[x][0].first;
      }
    }
  }
  return result;
}

Coupling recombine(const MapDecomposition& d, const std::vector<double>& mu, const std::vector<int>& arities) {
  const std::vector<int> rest = complement_axes(std::vector<int>{d.first_axis}, static_cast<int>(arities.size()));
  Coupling out(arities);
  MultiIndex full(arities.size());
  for (std::size_t k = 0; k < d.maps.size(); ++k) {
    for (std::size_t x = 0; x < mu.size(); ++x) {
      if (d.weights[k][x] <= 0.0) continue;
      full[d.first_axis] = static_cast<int>(x);
      for (std::size_t i = 0; i < rest.size(); ++i) full[rest[i]] = d.maps[k][x][i];
      out.add(full, d.weights[k][x] * mu[x]);
    }
  }
  return out;
}

namespace {

// v = (2/xi) A^{-T} x0, after validating the parameters.
Eigen::VectorXd gw_direction(const Point& x0, const Point& y0, const std::vector<std::vector<double>>& a, double xi) {
  if (xi == 0.0) throw Error(ErrorCode::kZeroXi, "xi must be nonzero");
  const Eigen::Index d = static_cast<Eigen::Index>(x0.size());
  if (static_cast<Eigen::Index>(y0.size()) != d || static_cast<Eigen::Index>(a.size()) != d) {
    throw Error(ErrorCode::kDimensionMismatch, "x0, y0 and A must share one dimension");
  }
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(a[i].size()) != d) throw Error(ErrorCode::kDimensionMismatch, "A must be square");
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = a[i][j];
  }
  if (std::abs(m.determinant()) <= 1e-10) throw Error(ErrorCode::kSingularMatrix, "A is not invertible");
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), d);
  return (2.0 / xi) * m.transpose().fullPivLu().solve(x);
}

}  // namespace

int gw_twist_count(const Point& x0, const Point& y0, const std::vector<std::vector<double>>& a, double xi,
                   const std::vector<Point>& candidates) {
  const Eigen::VectorXd v = gw_direction(x0, y0, a, xi);
  const Eigen::Index d = v.size();
  const Eigen::VectorXd base = Eigen::Map<const Eigen::VectorXd>(y0.data(), d);
  int count = 0;
  for (const Point& y : candidates) {
    if (static_cast<Eigen::Index>(y.size()) != d) throw Error(ErrorCode::kDimensionMismatch, "candidate dimension");
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), d);
    const Eigen::VectorXd rhs = base + v * (base.squaredNorm() - yy.squaredNorm());
    if ((yy - rhs).norm() <= 1e-8) ++count;
  }
  return count;
}

std::vector<Point> gw_twist_solutions(const Point& x0, const Point& y0, const std::vector<std::vector<double>>& a,
                                      double xi) {
  const Eigen::VectorXd v = gw_direction(x0, y0, a, xi);
  std::vector<Point> out{y0};
  const double vv = v.squaredNorm();
  if (vv == 0.0) return out;
  const Eigen::VectorXd base = Eigen::Map<const Eigen::VectorXd>(y0.data(), v.size());
  const double s = -(1.0 + 2.0 * base.dot(v)) / vv;
  if (s == 0.0) return out;
  const Eigen::VectorXd y = base + s * v;
  out.emplace_back(y.data(), y.data() + y.size());
  return out;
}

}  // namespace momt::extremality
