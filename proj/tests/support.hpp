#pragma once

#include <memory>
#include <random>
#include <vector>

#include "momt/instance.hpp"

namespace momt::testing {

inline std::vector<double> random_weights(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& v : w) total += (v = u(rng));
  for (double& v : w) v /= total;
  return w;
}

inline std::vector<double> uniform_weights(int n) { return std::vector<double>(n, 1.0 / n); }

inline DiscreteMeasure line_measure(const std::string& name, std::vector<double> weights) {
  DiscreteMeasure m;
  m.space.name = name;
  for (std::size_t i = 0; i < weights.size(); ++i) m.space.points.push_back({static_cast<double>(i)});
  m.weights = std::move(weights);
  return m;
}

inline DiscreteMeasure cloud_measure(std::mt19937_64& rng, const std::string& name, int n, int d,
                                     std::vector<double> weights) {
  std::normal_distribution<double> g(0.0, 1.0);
  DiscreteMeasure m;
  m.space.name = name;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (double& v : p) v = g(rng);
    m.space.points.push_back(std::move(p));
  }
  m.weights = std::move(weights);
  return m;
}

// Random cost table in [0, 1) over the given marginals.
inline DiscreteInstance table_instance(std::vector<DiscreteMeasure> marginals, std::mt19937_64& rng, Sense sense) {
  std::vector<int> arities;
  for (const auto& m : marginals) arities.push_back(m.size());
  costs::CostTensor t{Grid(arities), {}};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < t.grid.size(); ++i) t.values.push_back(u(rng));
  return DiscreteInstance::from_table(std::move(marginals), std::move(t), sense);
}

inline DiscreteInstance random_instance(std::uint64_t seed, const std::vector<int>& arities, Sense sense,
                                        bool uniform = false) {
  std::mt19937_64 rng(seed);
  std::vector<DiscreteMeasure> ms;
  for (std::size_t k = 0; k < arities.size(); ++k) {
    ms.push_back(line_measure("X" + std::to_string(k + 1),
                              uniform ? uniform_weights(arities[k]) : random_weights(rng, arities[k])));
  }
  return table_instance(std::move(ms), rng, sense);
}

inline DiscreteInstance tensor_instance(const std::vector<std::vector<double>>& weights, std::vector<double> values,
                                        Sense sense = Sense::kMin) {
  std::vector<DiscreteMeasure> ms;
  std::vector<int> arities;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    ms.push_back(line_measure("X" + std::to_string(k + 1), weights[k]));
    arities.push_back(static_cast<int>(weights[k].size()));
  }
  return DiscreteInstance::from_table(std::move(ms), costs::CostTensor{Grid(arities), std::move(values)}, sense);
}

inline DiscreteInstance point_instance(std::uint64_t seed, int n_axes, int n, int d, costs::CostKind kind, Sense sense,
                                       bool uniform = true) {
  std::mt19937_64 rng(seed);
  std::vector<DiscreteMeasure> ms;
  for (int k = 0; k < n_axes; ++k) {
    ms.push_back(cloud_measure(rng, "X" + std::to_string(k + 1), n, d,
                               uniform ? uniform_weights(n) : random_weights(rng, n)));
  }
  costs::CostSpec spec;
  spec.kind = kind;
  spec.sense = sense;
  return DiscreteInstance(std::move(ms), spec);
}

}  // namespace momt::testing
