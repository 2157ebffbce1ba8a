#include "momt/gangbo_swiech.hpp"

#include <algorithm>
#include <cmath>

#include "momt/error.hpp"

namespace momt::costs {

namespace {

void require_surplus(const DiscreteInstance& instance) {
  const CostKind kind = instance.cost().kind;
  if (kind != CostKind::kSurplus && kind != CostKind::kGangboSwiech) {
    throw Error(ErrorCode::kNotSurplusCost, "map formula needs the surplus cost");
  }
  if (instance.sense() != Sense::kMax) {
    throw Error(ErrorCode::kNotSurplusCost, "map formula needs the maximization sense");
  }
  if (instance.axes() < 3) throw Error(ErrorCode::kNotSurplusCost, "map formula needs at least three marginals");
}

const Point& point(const DiscreteInstance& instance, int axis, int atom) {
  return instance.marginal(axis).space.points[atom];
}

void accumulate(Point& into, const Point& p) {
  for (std::size_t i = 0; i < p.size(); ++i) into[i] += p[i];
}

}  // namespace

ConjugateTable gangbo_swiech_table(const DiscreteInstance& instance, const Potentials& potentials, int axis) {
  require_surplus(instance);
  const int n = instance.axes();
  if (axis < 1 || axis >= n) throw Error(ErrorCode::kIndexOutOfRange, "conjugate axis must be 2..N");
  std::vector<int> others;
  for (int k = 1; k < n; ++k) {
    if (k != axis) others.push_back(k);
  }
  const auto arities = instance.arities();
  std::vector<int> other_arities;
  for (int k : others) other_arities.push_back(arities[k]);
  const Grid grid(other_arities);
  const int d = instance.marginal(0).space.dimension();

  // Per tuple of the other axes: the summed point and the constant part.
  std::vector<Point> sums;
  std::vector<double> constants;
  MultiIndex r(others.size(), 0);
  do {
    Point sum(d, 0.0);
    double constant = 0.0;
    for (std::size_t a = 0; a < others.size(); ++a) {
      const Point& p = point(instance, others[a], r[a]);
      accumulate(sum, p);
      constant -= potentials.vectors[others[a]][r[a]];
      for (std::size_t b = a + 1; b < others.size(); ++b) constant += dot(p, point(instance, others[b], r[b]));
    }
    sums.push_back(std::move(sum));
    constants.push_back(constant);
  } while (grid.next(r));

  ConjugateTable table;
  for (int a = 0; a < arities[0]; ++a) {
    for (int b = 0; b < arities[axis]; ++b) {
      Point t = point(instance, 0, a);
      accumulate(t, point(instance, axis, b));
      table.samples.push_back(std::move(t));
    }
  }
  for (int b = 0; b < arities[axis]; ++b) table.samples.push_back(point(instance, axis, b));
  for (const Point& t : table.samples) {
    double psi = -INFINITY;
    for (std::size_t i = 0; i < sums.size(); ++i) psi = std::max(psi, dot(t, sums[i]) + constants[i]);
    table.values.push_back(0.5 * squared_norm(t) + psi);
  }
  return table;
}

GangboSwiechMaps gangbo_swiech_maps(const DiscreteInstance& instance, const Potentials& potentials,
                                    const Coupling& plan) {
  require_surplus(instance);
  const int n = instance.axes();
  const auto arities = instance.arities();
  const int d = instance.marginal(0).space.dimension();
  GangboSwiechMaps out;

  // Dphi_1 from the argmax over the other axes of c - sum_{k>=2} phi_k.
  const std::vector<int> rest_axes = complement_axes(std::vector<int>{0}, n);
  std::vector<int> rest_arities;
  for (int k : rest_axes) rest_arities.push_back(arities[k]);
  const Grid rest_grid(rest_arities);
  MultiIndex full(n);
  for (int x = 0; x < arities[0]; ++x) {
    full[0] = x;
    double best = -INFINITY;
    MultiIndex arg;
    bool tied = false;
    MultiIndex r(rest_axes.size(), 0);
    do {
      double v = 0.0;
      for (std::size_t a = 0; a < r.size(); ++a) {
        full[rest_axes[a]] = r[a];
        v -= potentials.vectors[rest_axes[a]][r[a]];
      }
      v += instance.cost_at(full);
      const double tol = 1e-12 * std::max(1.0, std::abs(v));
      if (arg.empty() || v > best + tol) {
        best = v;
        arg = r;
        tied = false;
      } else if (v >= best - tol) {
        tied = true;
      }
    } while (rest_grid.next(r));
    Point grad(d, 0.0);
    for (std::size_t a = 0; a < arg.size(); ++a) accumulate(grad, point(instance, rest_axes[a], arg[a]));
    out.dphi1.push_back(std::move(grad));
    out.dphi1_tied.push_back(tied);
  }

  out.images.resize(n);
  out.maps.resize(n);
  out.tied.resize(n);
  std::vector<std::vector<std::vector<int>>> fibers(n, std::vector<std::vector<int>>(arities[0]));
  for (const auto& [index, mass] : plan.entries()) {
    for (int j = 1; j < n; ++j) fibers[j][index[0]].push_back(index[j]);
  }
  for (int j = 1; j < n; ++j) {
    const ConjugateTable table = gangbo_swiech_table(instance, potentials, j);
    for (int x = 0; x < arities[0]; ++x) {
      const Point& x1 = point(instance, 0, x);
      Point s = x1;
      accumulate(s, out.dphi1[x]);
      const ConjugateValue c = legendre_conjugate(table, s);
      Point image = table.samples[c.argmax];
      for (int i = 0; i < d; ++i) image[i] -= x1[i];
      int nearest = 0;
      double nearest_distance = INFINITY;
      for (int b = 0; b < arities[j]; ++b) {
        Point diff = point(instance, j, b);
        for (int i = 0; i < d; ++i) diff[i] -= image[i];
        const double dist = std::sqrt(squared_norm(diff));
        if (dist < nearest_distance) {
          nearest_distance = dist;
          nearest = b;
        }
      }
      const bool tied = c.tied || out.dphi1_tied[x];
      out.images[j].push_back(image);
      out.maps[j].push_back(nearest);
      out.tied[j].push_back(tied);
      if (fibers[j][x].empty()) continue;
      if (tied) {
        ++out.excluded_tied;
        continue;
      }
      ++out.compared;
      bool agree = nearest_distance <= 1e-9;
      for (int y : fibers[j][x]) {
        agree = agree && y == nearest;
        Point diff = point(instance, j, y);
        for (int i = 0; i < d; ++i) diff[i] -= image[i];
        out.max_distance = std::max(out.max_distance, std::sqrt(squared_norm(diff)));
      }
      if (agree) ++out.agreeing;
    }
  }
  out.agreement_fraction = out.compared > 0 ? static_cast<double>(out.agreeing) / out.compared : 1.0;
  return out;
}

}  // namespace momt::costs
