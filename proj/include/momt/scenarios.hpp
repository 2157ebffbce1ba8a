#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "momt/instance.hpp"
#include "momt/twomap.hpp"

namespace momt::scenarios {

enum class ScenarioKind {
  kSphereReflection,
  kNestedShells,
  kGangboSwiech,
  kMongeQuadratic,
  kGromovWasserstein,
  kTwoMapDemo,
};

std::string_view kind_name(ScenarioKind kind);
// Accepts the full names and the short CLI names (sphere, shells, gs,
// monge, gw, twomap). Throws UnknownScenario.
ScenarioKind kind_from_name(std::string_view name);

// Zero / empty fields select per-kind defaults.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kGangboSwiech;
  std::uint64_t seed = 1;
  int n = 0;          // atoms per plane / per marginal / on X
  int dimension = 0;  // ambient dimension
  int marginals = 0;  // gangboSwiech only

  // sphereReflection
  int mirror_pairs = 0;
  int equator_points = 0;

  // nestedShells: shells centered at `center`, planes <normal, x> = offset
  std::vector<double> shell_radii;
  int atoms_per_shell = 0;
  Point center;
  Point normal;
  double plane_offset_x = -0.5;
  double plane_offset_y = 0.5;

  // gromovWasserstein (xi = 0 / empty matrix: drawn from the seed)
  int target_atoms = 0;
  double xi = 0.0;
  std::vector<std::vector<double>> matrix;
  int twist_trials = 100;

  // twoMapDemo (empty: drawn from the seed in [0.1, 0.9])
  std::vector<double> alpha;
  std::vector<double> beta;

  // mongeQuadratic: move one Y atom onto an X atom (hypothesis violation)
  bool touching = false;

  int max_cycle = 3;
  double tolerance = 1e-8;
};

// Fills the per-kind defaults and checks the config invariants.
ScenarioConfig resolve(ScenarioConfig config);

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

struct ScenarioResult {
  nlohmann::ordered_json report;
  std::vector<CsvTable> tables;
  bool pass = false;
};

struct SphereInstance {
  DiscreteInstance instance;
  std::vector<int> reflection;  // involution on Z atoms
};

struct ShellInstance {
  DiscreteInstance instance;
  std::vector<int> shell;      // shell of each Z atom, innermost = 0
  std::vector<Point> normals;  // outward unit normal of each Z atom
};

struct TwoMapInstance {
  DiscreteInstance instance;
  twomap::TwoMapData data;  // indices refer to the instance atoms
};

SphereInstance gen_sphere_reflection(const ScenarioConfig& config);
ShellInstance gen_nested_shells(const ScenarioConfig& config);
DiscreteInstance gen_gangbo_swiech(const ScenarioConfig& config);
DiscreteInstance gen_monge_quadratic(const ScenarioConfig& config);
DiscreteInstance gen_gromov_wasserstein(const ScenarioConfig& config);
TwoMapInstance gen_two_map(const ScenarioConfig& config);

ScenarioResult run_sphere_reflection(const ScenarioConfig& config);
ScenarioResult run_nested_shells(const ScenarioConfig& config);
ScenarioResult run_gangbo_swiech(const ScenarioConfig& config);
ScenarioResult run_monge_quadratic(const ScenarioConfig& config);
ScenarioResult run_gromov_wasserstein(const ScenarioConfig& config);
ScenarioResult run_two_map_demo(const ScenarioConfig& config);

ScenarioResult run(const ScenarioConfig& config);

// Sparse plan as [{"index": [...], "mass": m}, ...] in lexicographic order.
nlohmann::ordered_json plan_json(const Coupling& plan);

}  // namespace momt::scenarios
