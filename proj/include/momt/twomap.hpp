#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "momt/measure.hpp"
#include "momt/simplex.hpp"

namespace momt::twomap {

struct Window {
  double low = 0.0;
  double high = 0.0;
};

// Admissible range of L11 for weights alpha, beta in [0,1].
Window lij_window(double alpha, double beta);

// (L11, L12, L21, L22): mass on (T_i(x), G_j(x)) per unit of mu(x).
struct LTuple {
  double l11 = 0.0;
  double l12 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;
};

// The tuple solving the four marginal equations with the given L11.
LTuple tuple_from_l11(double alpha, double beta, double l11);

// Largest residual of the four marginal equations.
double taga_residual(double alpha, double beta, const LTuple& l);

// Product form (alpha beta, alpha (1-beta), (1-alpha) beta, (1-alpha)(1-beta)).
LTuple product_form(double alpha, double beta);

// Two-map data over X atoms: X x Y restriction alpha d_{T1} + (1-alpha) d_{T2},
// X x Z restriction beta d_{G1} + (1-beta) d_{G2}.
struct TwoMapData {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<int> t1, t2;
  std::vector<int> g1, g2;
  int ny = 0;
  int nz = 0;
};

struct TwoMapAssembly {
  TwoMapData data;  // with alpha (beta) coalesced to 1 where T1 = T2 (G1 = G2)
  std::vector<LTuple> l;
  std::optional<std::vector<double>> theta;
};

// Assembly with L11 = theta * low + (1 - theta) * high per atom, so theta = 1
// is the lower endpoint.
TwoMapAssembly assembly_at(const TwoMapData& data, const std::vector<double>& theta);

// (lower, upper): L11 at the two window endpoints on every atom.
std::pair<TwoMapAssembly, TwoMapAssembly> extreme_assemblies(const TwoMapData& data);

struct UniqueCondition {
  std::vector<bool> per_atom;
  bool global = true;
};

// alpha or beta in {0, 1} (within 1e-12) on each atom.
UniqueCondition unique_condition(const std::vector<double>& alpha, const std::vector<double>& beta);

// (sum L_ij(x) d_{T_i(x)} d_{G_j(x)}) (x) mu on X x Y x Z.
Coupling assemble_three_marginal(const TwoMapAssembly& assembly, const std::vector<double>& mu);

// The two prescribed restrictions.
Coupling xy_restriction(const TwoMapData& data, const std::vector<double>& mu);
Coupling xz_restriction(const TwoMapData& data, const std::vector<double>& mu);

// Per-atom theta reproducing `plan`'s L11; 0 where the window is collapsed.
std::vector<double> recover_theta(const TwoMapData& data, const Coupling& plan, const std::vector<double>& mu);

// Couplings on X x Y x Z with the given X x Y and X x Z restrictions, one
// column per grid cell (row-major) and one row per (x,y) and (x,z) pair.
lp::EqualitySystem constrained_system(const Coupling& xy, const Coupling& xz);

}  // namespace momt::twomap
