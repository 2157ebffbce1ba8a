#include "momt/twomap.hpp"

#include <algorithm>
#include <cmath>

#include "momt/error.hpp"

namespace momt::twomap {

namespace {

constexpr double kUnitTolerance = 1e-12;

void check_unit(double v, const char* name) {
  if (!(v >= -kUnitTolerance && v <= 1.0 + kUnitTolerance)) {
    throw Error(ErrorCode::kOutOfRange, std::string(name) + " = " + std::to_string(v) + " is outside [0,1]");
  }
}

void check_data(const TwoMapData& d) {
  const std::size_t n = d.alpha.size();
  if (d.beta.size() != n || d.t1.size() != n || d.t2.size() != n || d.g1.size() != n || d.g2.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "two-map data vectors differ in length");
  }
  for (std::size_t x = 0; x < n; ++x) {
    check_unit(d.alpha[x], "alpha");
    check_unit(d.beta[x], "beta");
    if (d.t1[x] < 0 || d.t1[x] >= d.ny || d.t2[x] < 0 || d.t2[x] >= d.ny || d.g1[x] < 0 || d.g1[x] >= d.nz ||
        d.g2[x] < 0 || d.g2[x] >= d.nz) {
      throw Error(ErrorCode::kIndexOutOfRange, "map image outside the target space");
    }
  }
}

TwoMapData coalesce(TwoMapData d) {
  for (std::size_t x = 0; x < d.alpha.size(); ++x) {
    if (d.t1[x] == d.t2[x]) d.alpha[x] = 1.0;
    if (d.g1[x] == d.g2[x]) d.beta[x] = 1.0;
  }
  return d;
}

}  // namespace

Window lij_window(double alpha, double beta) {
  check_unit(alpha, "alpha");
  check_unit(beta, "beta");
  return {std::max(0.0, alpha + beta - 1.0), std::min(alpha, beta)};
}

LTuple tuple_from_l11(double alpha, double beta, double l11) {
  return {l11, alpha - l11, beta - l11, 1.0 - (alpha + beta) + l11};
}

double taga_residual(double alpha, double beta, const LTuple& l) {
  return std::max({std::abs(l.l11 + l.l12 - alpha), std::abs(l.l21 + l.l22 - (1.0 - alpha)),
                   std::abs(l.l11 + l.l21 - beta), std::abs(l.l12 + l.l22 - (1.0 - beta))});
}

LTuple product_form(double alpha, double beta) {
  return {alpha * beta, alpha * (1.0 - beta), (1.0 - alpha) * beta, (1.0 - alpha) * (1.0 - beta)};
}

TwoMapAssembly assembly_at(const TwoMapData& data, const std::vector<double>& theta) {
  check_data(data);
  if (theta.size() != data.alpha.size()) throw Error(ErrorCode::kDimensionMismatch, "theta length");
  TwoMapAssembly out{coalesce(data), {}, theta};
  for (std::size_t x = 0; x < theta.size(); ++x) {
    check_unit(theta[x], "theta");
    const double a = out.data.alpha[x];
    const double b = out.data.beta[x];
    const Window w = lij_window(a, b);
    out.l.push_back(tuple_from_l11(a, b, theta[x] * w.low + (1.0 - theta[x]) * w.high));
  }
  return out;
}

std::pair<TwoMapAssembly, TwoMapAssembly> extreme_assemblies(const TwoMapData& data) {
  const std::size_t n = data.alpha.size();
  return {assembly_at(data, std::vector<double>(n, 1.0)), assembly_at(data, std::vector<double>(n, 0.0))};
}

UniqueCondition unique_condition(const std::vector<double>& alpha, const std::vector<double>& beta) {
  if (alpha.size() != beta.size()) throw Error(ErrorCode::kDimensionMismatch, "alpha and beta differ in length");
  auto binary = [](double v) { return std::abs(v) <= kUnitTolerance || std::abs(v - 1.0) <= kUnitTolerance; };
  UniqueCondition out;
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    const bool ok = binary(alpha[x]) || binary(beta[x]);
    out.per_atom.push_back(ok);
    out.global = out.global && ok;
  }
  return out;
}

Coupling assemble_three_marginal(const TwoMapAssembly& assembly, const std::vector<double>& mu) {
  const TwoMapData& d = assembly.data;
  if (mu.size() != d.alpha.size() || assembly.l.size() != mu.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "assembly and mu differ in length");
  }
  const int n = static_cast<int>(mu.size());
  Coupling out({n, d.ny, d.nz});
  for (int x = 0; x < n; ++x) {
    const LTuple& l = assembly.l[x];
    const double residual = taga_residual(d.alpha[x], d.beta[x], l);
    const double low = std::min({l.l11, l.l12, l.l21, l.l22});
    const double high = std::max({l.l11, l.l12, l.l21, l.l22});
    if (residual > kUnitTolerance || low < -kUnitTolerance || high > 1.0 + kUnitTolerance) {
      throw Error(ErrorCode::kInvariantViolation, "L tuple at atom " + std::to_string(x) + " is not admissible");
    }
    out.add({x, d.t1[x], d.g1[x]}, mu[x] * std::max(0.0, l.l11));
    out.add({x, d.t1[x], d.g2[x]}, mu[x] * std::max(0.0, l.l12));
    out.add({x, d.t2[x], d.g1[x]}, mu[x] * std::max(0.0, l.l21));
    out.add({x, d.t2[x], d.g2[x]}, mu[x] * std::max(0.0, l.l22));
  }
  return out;
}

Coupling xy_restriction(const TwoMapData& data, const std::vector<double>& mu) {
  check_data(data);
  const int n = static_cast<int>(mu.size());
  Coupling out({n, data.ny});
  for (int x = 0; x < n; ++x) {
    out.add({x, data.t1[x]}, mu[x] * data.alpha[x]);
    out.add({x, data.t2[x]}, mu[x] * (1.0 - data.alpha[x]));
  }
  return out;
}

Coupling xz_restriction(const TwoMapData& data, const std::vector<double>& mu) {
  check_data(data);
  const int n = static_cast<int>(mu.size());
  Coupling out({n, data.nz});
  for (int x = 0; x < n; ++x) {
    out.add({x, data.g1[x]}, mu[x] * data.beta[x]);
    out.add({x, data.g2[x]}, mu[x] * (1.0 - data.beta[x]));
  }
  return out;
}

std::vector<double> recover_theta(const TwoMapData& data, const Coupling& plan, const std::vector<double>& mu) {
  check_data(data);
  const TwoMapData d = coalesce(data);
  std::vector<double> theta(mu.size(), 0.0);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    const Window w = lij_window(d.alpha[x], d.beta[x]);
    if (w.high - w.low <= kUnitTolerance) continue;
    const int xi = static_cast<int>(x);
    double l11 = plan.mass({xi, d.t1[x], d.g1[x]}) / mu[x];
    theta[x] = std::clamp((w.high - l11) / (w.high - w.low), 0.0, 1.0);
  }
  return theta;
}

lp::EqualitySystem constrained_system(const Coupling& xy, const Coupling& xz) {
  const int nx = xy.arities().at(0);
  const int ny = xy.arities().at(1);
  const int nz = xz.arities().at(1);
  if (xz.arities().at(0) != nx) throw Error(ErrorCode::kDimensionMismatch, "restrictions disagree on X");
  lp::EqualitySystem system;
  system.rows = nx * ny + nx * nz;
  system.rhs.assign(system.rows, 0.0);
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) system.rhs[x * ny + y] = xy.mass({x, y});
    for (int z = 0; z < nz; ++z) system.rhs[nx * ny + x * nz + z] = xz.mass({x, z});
  }
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      for (int z = 0; z < nz; ++z) {
        system.columns.push_back({{x * ny + y, nx * ny + x * nz + z}, {1.0, 1.0}});
      }
    }
  }
  return system;
}

}  // namespace momt::twomap
