#include "momt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "momt/error.hpp"

namespace momt {

namespace {

void check_subset(const std::vector<int>& subset, int axes) {
  if (subset.empty()) throw Error(ErrorCode::kEmptySubset, "axis subset is empty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= axes || (i > 0 && subset[i] <= subset[i - 1])) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "axis subset must be strictly increasing within 0.." + std::to_string(axes - 1));
    }
  }
}

double max_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

void validate_space(const Space& space) {
  if (space.points.empty()) {
    throw Error(ErrorCode::kSchemaError, "space '" + space.name + "' has no points");
  }
  const std::size_t d = space.points.front().size();
  if (d == 0) throw Error(ErrorCode::kSchemaError, "space '" + space.name + "' has dimension 0");
  for (const Point& p : space.points) {
    if (p.size() != d) {
      throw Error(ErrorCode::kSchemaError, "space '" + space.name + "' mixes point dimensions");
    }
    for (double v : p) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kSchemaError, "space '" + space.name + "' has a non-finite coordinate");
      }
    }
  }
  for (std::size_t i = 0; i < space.points.size(); ++i) {
    for (std::size_t j = i + 1; j < space.points.size(); ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        dist = std::max(dist, std::abs(space.points[i][k] - space.points[j][k]));
      }
      if (dist <= kStorageTolerance) {
        std::ostringstream msg;
        msg << "space '" << space.name << "' has coincident points " << i << " and " << j;
        throw Error(ErrorCode::kSchemaError, msg.str());
      }
    }
  }
}

void validate_measure(const DiscreteMeasure& measure) {
  validate_space(measure.space);
  if (measure.weights.size() != measure.space.points.size()) {
    throw Error(ErrorCode::kSchemaError, "space '" + measure.space.name +
                                             "': weight count differs from point count");
  }
  double sum = 0.0;
  for (double w : measure.weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kSchemaError, "space '" + measure.space.name + "': negative weight");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kStorageTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "space '" << measure.space.name << "': weights sum to " << sum << ", expected 1";
    throw Error(ErrorCode::kSchemaError, msg.str());
  }
}

std::vector<int> drop_null_atoms(DiscreteMeasure& measure) {
  std::vector<int> kept;
  DiscreteMeasure out{Space{measure.space.name, {}}, {}};
  for (int i = 0; i < measure.size(); ++i) {
    if (measure.weights[i] > 0.0) {
      kept.push_back(i);
      out.space.points.push_back(measure.space.points[i]);
      out.weights.push_back(measure.weights[i]);
    }
  }
  measure = std::move(out);
  return kept;
}

Coupling::Coupling(std::vector<int> arities) : arities_(std::move(arities)) {}

Coupling::Coupling(std::vector<int> arities, Entries entries) : arities_(std::move(arities)) {
  Grid grid(arities_);
  for (auto& [index, mass] : entries) {
    if (!grid.contains(index)) {
      throw Error(ErrorCode::kIndexOutOfRange, "coupling entry outside arity bounds");
    }
    if (!(mass >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative coupling mass");
    if (mass >= kMassFloor) entries_.emplace(index, mass);
  }
}

double Coupling::mass(const MultiIndex& index) const {
  auto it = entries_.find(index);
  return it == entries_.end() ? 0.0 : it->second;
}

double Coupling::total_mass() const {
  double total = 0.0;
  for (const auto& [index, mass] : entries_) total += mass;
  return total;
}

void Coupling::add(const MultiIndex& index, double mass) {
  if (mass == 0.0) return;
  auto [it, inserted] = entries_.try_emplace(index, 0.0);
  it->second += mass;
  if (it->second < kMassFloor) entries_.erase(it);
}

std::vector<double> Coupling::axis_marginal(int axis) const {
  std::vector<double> out(arities_.at(axis), 0.0);
  for (const auto& [index, mass] : entries_) out[index[axis]] += mass;
  return out;
}

std::vector<MultiIndex> Coupling::support() const {
  std::vector<MultiIndex> out;
  out.reserve(entries_.size());
  for (const auto& [index, mass] : entries_) out.push_back(index);
  return out;
}

double total_variation(const Coupling& a, const Coupling& b) {
  double sum = 0.0;
  for (const auto& [index, mass] : a.entries()) sum += std::abs(mass - b.mass(index));
  for (const auto& [index, mass] : b.entries()) {
    if (!a.entries().contains(index)) sum += mass;
  }
  return 0.5 * sum;
}

double max_abs_difference(const Coupling& a, const Coupling& b) {
  double worst = 0.0;
  for (const auto& [index, mass] : a.entries()) worst = std::max(worst, std::abs(mass - b.mass(index)));
  for (const auto& [index, mass] : b.entries()) worst = std::max(worst, std::abs(mass - a.mass(index)));
  return worst;
}

Coupling product_coupling(const std::vector<std::vector<double>>& weights) {
  std::vector<int> arities;
  for (const auto& w : weights) arities.push_back(static_cast<int>(w.size()));
  Coupling out(arities);
  Grid grid(arities);
  MultiIndex index(arities.size(), 0);
  do {
    double mass = 1.0;
    for (std::size_t k = 0; k < weights.size(); ++k) mass *= weights[k][index[k]];
    out.add(index, mass);
  } while (grid.next(index));
  return out;
}

Coupling graph_coupling(const std::vector<double>& mu, const std::vector<int>& map, int target_size) {
  Coupling out({static_cast<int>(mu.size()), target_size});
  for (std::size_t i = 0; i < mu.size(); ++i) out.add({static_cast<int>(i), map.at(i)}, mu[i]);
  return out;
}

Coupling pushforward(const Coupling& plan, const std::vector<int>& subset) {
  check_subset(subset, plan.axes());
  std::vector<int> arities;
  for (int a : subset) arities.push_back(plan.arities()[a]);
  Coupling out(arities);
  for (const auto& [index, mass] : plan.entries()) out.add(project_index(index, subset), mass);
  return out;
}

Disintegration disintegrate(const Coupling& plan, const std::vector<int>& conditioning) {
  check_subset(conditioning, plan.axes());
  if (static_cast<int>(conditioning.size()) == plan.axes()) {
    throw Error(ErrorCode::kSubsetNotProper, "conditioning must leave at least one axis");
  }
  Disintegration d;
  d.conditioning = conditioning;
  d.complement = complement_axes(conditioning, plan.axes());
  d.base = pushforward(plan, conditioning);
  std::vector<int> rest_arities;
  for (int a : d.complement) rest_arities.push_back(plan.arities()[a]);
  for (const auto& [index, mass] : plan.entries()) {
    MultiIndex b = project_index(index, conditioning);
    auto [it, inserted] = d.conditionals.try_emplace(b, Coupling(rest_arities));
    it->second.add(project_index(index, d.complement), mass / d.base.mass(b));
  }
  return d;
}

Coupling recombine(const Disintegration& d) {
  std::vector<int> arities(d.conditioning.size() + d.complement.size());
  for (std::size_t i = 0; i < d.conditioning.size(); ++i) {
    arities[d.conditioning[i]] = d.base.arities()[i];
  }
  std::vector<int> rest_arities;
  if (!d.conditionals.empty()) rest_arities = d.conditionals.begin()->second.arities();
  for (std::size_t i = 0; i < d.complement.size() && i < rest_arities.size(); ++i) {
    arities[d.complement[i]] = rest_arities[i];
  }
  Coupling out(arities);
  MultiIndex full(arities.size());
  for (const auto& [b, conditional] : d.conditionals) {
    const double base_mass = d.base.mass(b);
    for (const auto& [q, w] : conditional.entries()) {
      for (std::size_t i = 0; i < b.size(); ++i) full[d.conditioning[i]] = b[i];
      for (std::size_t i = 0; i < q.size(); ++i) full[d.complement[i]] = q[i];
      out.add(full, base_mass * w);
    }
  }
  return out;
}

Coupling glue(const Coupling& left, const Coupling& right) {
  if (left.axes() < 2 || right.axes() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "gluing needs two couplings with at least two axes");
  }
  const auto left_mu = left.axis_marginal(0);
  const auto right_mu = right.axis_marginal(0);
  const double deviation = max_deviation(left_mu, right_mu);
  if (!(deviation <= kGluingTolerance)) {
    std::ostringstream msg;
    msg << "axis 0 marginals differ by " << deviation;
    throw Error(ErrorCode::kMarginalMismatch, msg.str());
  }
  const Disintegration dl = disintegrate(left, {0});
  const Disintegration dr = disintegrate(right, {0});
  std::vector<int> arities = left.arities();
  arities.insert(arities.end(), right.arities().begin() + 1, right.arities().end());
  Coupling out(arities);
  for (const auto& [x, cond_left] : dl.conditionals) {
    auto it = dr.conditionals.find(x);
    if (it == dr.conditionals.end()) continue;  // only possible for sub-tolerance mass
    const double mu_x = 0.5 * (dl.base.mass(x) + dr.base.mass(x));
    for (const auto& [y, wy] : cond_left.entries()) {
      for (const auto& [z, wz] : it->second.entries()) {
        MultiIndex full = x;
        full.insert(full.end(), y.begin(), y.end());
        full.insert(full.end(), z.begin(), z.end());
        out.add(full, mu_x * wy * wz);
      }
    }
  }
  return out;
}

Coupling assemble_product_conditional(const Coupling& base, const std::vector<int>& base_axes,
                                      const std::vector<BlockMap>& maps,
                                      const std::optional<ResidualBlock>& residual,
                                      const std::vector<int>& arities) {
  std::vector<int> cover(arities.size(), 0);
  auto mark = [&](const std::vector<int>& axes) {
    for (int a : axes) {
      if (a < 0 || a >= static_cast<int>(arities.size())) {
        throw Error(ErrorCode::kIndexOutOfRange, "assembly axis out of range");
      }
      ++cover[a];
    }
  };
  mark(base_axes);
  for (const BlockMap& m : maps) mark(m.axes);
  if (residual) mark(residual->axes);
  if (std::any_of(cover.begin(), cover.end(), [](int c) { return c != 1; })) {
    throw Error(ErrorCode::kInvalidArgument, "assembly blocks must partition the axes");
  }
  if (residual) {
    const double deviation = max_abs_difference(residual->conditionals->base, base);
    if (!(deviation <= kGluingTolerance)) {
      std::ostringstream msg;
      msg << "residual base differs from assembly base by " << deviation;
      throw Error(ErrorCode::kMarginalMismatch, msg.str());
    }
  }

  Coupling out(arities);
  MultiIndex full(arities.size());
  for (const auto& [b, mass] : base.entries()) {
    for (std::size_t i = 0; i < b.size(); ++i) full[base_axes[i]] = b[i];
    for (const BlockMap& m : maps) {
      auto it = m.image.find(b);
      if (it == m.image.end()) {
        std::ostringstream msg;
        msg << "map undefined at base atom (";
        for (std::size_t i = 0; i < b.size(); ++i) msg << (i ? "," : "") << b[i];
        msg << ")";
        throw Error(ErrorCode::kMapDomainGap, msg.str());
      }
      for (std::size_t i = 0; i < m.axes.size(); ++i) full[m.axes[i]] = it->second[i];
    }
    if (!residual) {
      out.add(full, mass);
      continue;
    }
    auto it = residual->conditionals->conditionals.find(b);
    if (it == residual->conditionals->conditionals.end()) {
      throw Error(ErrorCode::kMapDomainGap, "residual conditional missing at a base atom");
    }
    for (const auto& [q, w] : it->second.entries()) {
      for (std::size_t i = 0; i < q.size(); ++i) full[residual->axes[i]] = q[i];
      out.add(full, mass * w);
    }
  }
  return out;
}

}  // namespace momt
