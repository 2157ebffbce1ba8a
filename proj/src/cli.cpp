#include "momt/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "momt/error.hpp"
#include "momt/extremality.hpp"
#include "momt/io.hpp"
#include "momt/lp.hpp"
#include "momt/reduction.hpp"
#include "momt/scenarios.hpp"

namespace momt::cli {

namespace {

using io::json;

struct Common {
  std::string out;
  double tol = 1e-8;
};

void emit(const Common& common, const std::string& text, std::ostream& out) {
  if (common.out.empty()) {
    out << text;
  } else {
    io::write_text(common.out, text);
  }
}

std::string sense_name(Sense s) { return s == Sense::kMin ? "min" : "max"; }

json solve_block(const DiscreteInstance& inst, const lp::Solution& sol, const std::string& hash, double tol) {
  json r;
  r["version"] = io::kSchemaVersion;
  r["sense"] = sense_name(inst.sense());
  r["value"] = sol.value;
  r["dual_value"] = sol.dual_value;
  r["support"] = io::support_json(sol.plan);
  r["potentials"] = io::potentials_json(sol.potentials);
  json cert;
  cert["duality_gap"] = std::abs(sol.value - sol.dual_value);
  cert["complementary_slackness_gap"] = lp::complementary_slackness_gap(inst, sol.plan, sol.potentials);
  cert["dual_infeasibility"] = dual_infeasibility(inst, sol.potentials);
  cert["marginal_deviation"] = marginal_deviation(inst, sol.plan);
  r["certificates"] = cert;
  r["provenance"] = {{"instance_hash", hash},
                     {"iterations", sol.iterations},
                     {"tolerance", tol},
                     {"dropped_atoms", [&] {
                        json d = json::array();
                        for (int k = 0; k < inst.axes(); ++k) {
                          d.push_back(static_cast<int>(inst.kept_atoms()[k].size()) != inst.marginal(k).size());
                        }
                        return d;
                      }()}};
  return r;
}

struct Loaded {
  std::string text;
  io::InstanceFile file;
  DiscreteInstance instance;
};

Loaded load(const std::string& path) {
  std::string text = io::read_text(path);
  io::InstanceFile file = io::parse_instance(text);
  DiscreteInstance instance = io::to_instance(file);
  return {std::move(text), std::move(file), std::move(instance)};
}

int cmd_solve(const std::string& path, bool oracle, const Common& common, std::ostream& out) {
  const Loaded in = load(path);
  const lp::Solution sol = lp::solve(in.instance);
  json r = solve_block(in.instance, sol, io::fnv1a_hex(in.text), common.tol);
  if (oracle) {
    json o;
    std::size_t cells = in.instance.grid().size();
    if (cells > 81) {
      o["skipped"] = "instance exceeds the oracle cap of 81 cells";
    } else {
      const double best = lp::oracle_optimum(in.instance);
      o["optimum"] = best;
      o["difference"] = std::abs(best - sol.value);
      o["agrees"] = std::abs(best - sol.value) <= 1e-9;
      o["is_vertex"] = lp::is_vertex(sol.plan, in.instance.weights());
    }
    r["certificates"]["oracle"] = o;
  }
  emit(common, io::dump(r), out);
  return kExitOk;
}

int cmd_reduce(const std::string& path, const std::string& subset_text, const std::string& report_path,
               const Common& common, std::ostream& out) {
  const Loaded in = load(path);
  std::vector<int> subset = parse_int_list(subset_text);
  for (int& a : subset) --a;
  reduction::validate_subset(subset, in.instance.axes());
  const lp::Solution sol = lp::solve(in.instance);
  const reduction::ReducedProblem reduced = reduction::reduce(in.instance, sol.potentials, subset);
  const reduction::ReductionReport rep =
      reduction::verify_reduction_optimality(in.instance, sol.plan, sol.potentials, subset, common.tol);

  io::InstanceFile file = io::from_instance(reduced.to_instance());
  io::Provenance prov;
  prov.parent_hash = io::fnv1a_hex(in.text);
  for (int a : subset) prov.subset.push_back(a + 1);
  prov.gauge = "axes 2..N have zero weighted mean";
  prov.potentials = sol.potentials.vectors;
  file.provenance = prov;

  json report;
  report["subset"] = prov.subset;
  report["reduced_optimum"] = rep.reduced_optimum;
  report["pushforward_value"] = rep.pushforward_value;
  report["gap"] = rep.gap;
  report["split_gap"] = rep.split_gap;
  report["inherited_infeasibility"] = rep.inherited_infeasibility;
  report["inherited_dual_gap"] = rep.inherited_dual_gap;
  report["pass"] = rep.pass;

  // With --out the reduced instance goes to the file and the report to stdout.
  if (common.out.empty()) {
    json both;
    both["instance"] = io::instance_json(file);
    both["report"] = report;
    out << io::dump(both);
  } else {
    io::write_text(common.out, io::dump_instance(file));
    if (report_path.empty()) {
      out << io::dump(report);
    }
  }
  if (!report_path.empty()) io::write_text(report_path, io::dump(report));
  return kExitOk;
}

int cmd_diagnose(const std::string& path, const std::string& split_text, int max_cycle, std::uint64_t seed,
                 const Common& common, std::ostream& out) {
  const Loaded in = load(path);
  const DiscreteInstance& inst = in.instance;
  const lp::Solution sol = lp::solve(inst);
  json r = solve_block(inst, sol, io::fnv1a_hex(in.text), common.tol);
  json& cert = r["certificates"];

  const auto support = sol.plan.support();
  const auto mono = extremality::check_cyclical_monotonicity(support, inst.table(), inst.sense(), max_cycle, 100, seed);
  cert["cyclical_monotonicity"] = {{"pass", mono.pass}, {"max_cycle", max_cycle}, {"cycles_checked", mono.cycles_checked}};

  std::vector<int> first = parse_int_list(split_text);
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i] < 1 || first[i] > inst.axes() || (i > 0 && first[i] <= first[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "--split must be increasing 1-based axes");
    }
    --first[i];
  }
  if (first.empty() || static_cast<int>(first.size()) == inst.axes()) {
    throw Error(ErrorCode::kSubsetNotProper, "--split must leave at least one axis on each side");
  }
  // c-extremality is a property of the minimizing set; use strictly
  // complementary potentials so that it matches the optimal face.
  const auto strict = lp::strictly_complementary_potentials(inst, sol.plan);
  const auto gamma = lp::minimizing_set(inst, strict.potentials, common.tol);
  const std::vector<MultiIndex>& cells = gamma.indices;
  const auto fibers = extremality::fiber_report(cells, inst.table(), first);
  const auto extreme = extremality::check_c_extreme(fibers);
  json ce = {{"pass", extreme.pass},
             {"first_axes", split_text},
             {"minimizing_set_size", cells.size()},
             {"max_fiber", fibers.max_fiber()}};
  if (extreme.violation) {
    ce["violation"] = {{"x1", extreme.violation->x1}, {"x2", extreme.violation->x2}, {"shared", extreme.violation->shared}};
  }
  cert["c_extreme"] = ce;
  cert["is_vertex"] = lp::is_vertex(sol.plan, inst.weights());

  lp::CertificateOptions options;
  options.seed = seed;
  options.potentials = sol.potentials;
  const auto u = lp::uniqueness_certificate(inst, sol.plan, sol.value, options);
  json uj = {{"status", std::string(lp::status_name(u.status))},
             {"face_probe_value_gap", u.face_probe_value_gap},
             {"witness_distance", u.witness_distance}};
  if (u.witness) uj["witness"] = io::support_json(*u.witness);
  cert["uniqueness"] = uj;
  emit(common, io::dump(r), out);
  return kExitOk;
}

struct ScenarioFlags {
  std::string kind;
  std::uint64_t seed = 1;
  int n = 0, d = 0, marginals = 0, batch = 1;
  int mirror_pairs = 0, equator = 0, atoms_per_shell = 0, target_atoms = 0, trials = 100, max_cycle = 3;
  std::string shells, alpha, beta, csv_dir;
  double xi = 0.0;
  bool touching = false;
};

int cmd_scenario(const ScenarioFlags& f, const Common& common, std::ostream& out) {
  scenarios::ScenarioConfig base;
  base.kind = scenarios::kind_from_name(f.kind);
  base.n = f.n;
  base.dimension = f.d;
  base.marginals = f.marginals;
  base.mirror_pairs = f.mirror_pairs;
  base.equator_points = f.equator;
  base.atoms_per_shell = f.atoms_per_shell;
  if (!f.shells.empty()) base.shell_radii = parse_double_list(f.shells);
  base.target_atoms = f.target_atoms;
  base.twist_trials = f.trials;
  base.xi = f.xi;
  if (!f.alpha.empty()) base.alpha = parse_double_list(f.alpha);
  if (!f.beta.empty()) base.beta = parse_double_list(f.beta);
  base.touching = f.touching;
  base.max_cycle = f.max_cycle;
  base.tolerance = common.tol;
  if (f.batch < 1) throw Error(ErrorCode::kInvalidArgument, "--batch must be at least 1");
  scenarios::resolve(base);  // validate before fanning out

  std::vector<scenarios::ScenarioResult> results(f.batch);
  std::vector<std::exception_ptr> errors(f.batch);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < f.batch; i = next++) {
      scenarios::ScenarioConfig c = base;
      c.seed = f.seed + static_cast<std::uint64_t>(i);
      try {
        results[i] = scenarios::run(c);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(f.batch));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (!f.csv_dir.empty()) {
    std::filesystem::create_directories(f.csv_dir);
    for (int i = 0; i < f.batch; ++i) {
      const std::string stem = std::string(scenarios::kind_name(base.kind)) + "_" + std::to_string(f.seed + i);
      for (const auto& t : results[i].tables) {
        io::write_text((std::filesystem::path(f.csv_dir) / (stem + "_" + t.name + ".csv")).string(), t.render());
      }
    }
  }
  json doc;
  if (f.batch == 1) {
    doc = results[0].report;
  } else {
    doc = json::array();
    for (const auto& r : results) doc.push_back(r.report);
  }
  emit(common, io::dump(doc), out);
  return kExitOk;
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("MOMT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorCode::kInvalidArgument, "bad integer list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorCode::kInvalidArgument, "bad number list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete multi-marginal optimal transport toolkit", "momt"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Write the result here instead of stdout");
    sub->add_option("--tol", common.tol, "Acceptance tolerance")->check(CLI::PositiveNumber);
  };

  std::string path;
  bool oracle = false;
  auto* solve = app.add_subcommand("solve", "Solve an instance file exactly");
  solve->add_option("instance", path, "Instance JSON")->required();
  solve->add_flag("--oracle", oracle, "Cross-check against vertex enumeration (tiny instances)");
  add_common(solve);

  std::string subset, report_path;
  auto* reduce = app.add_subcommand("reduce", "Build the reduced problem on a subset of marginals");
  reduce->add_option("instance", path, "Instance JSON")->required();
  reduce->add_option("--subset", subset, "1-based marginal indices, e.g. 1,2")->required();
  reduce->add_option("--report", report_path, "Write the optimality report here");
  add_common(reduce);

  std::string split = "1";
  int max_cycle = 3;
  std::uint64_t seed = 1;
  auto* diagnose = app.add_subcommand("diagnose", "Solve and certify monotonicity, extremality and uniqueness");
  diagnose->add_option("instance", path, "Instance JSON")->required();
  diagnose->add_option("--split", split, "1-based first block for the c-extreme check");
  diagnose->add_option("--max-cycle", max_cycle, "Longest exhaustive cycle")->check(CLI::Range(2, 8));
  diagnose->add_option("--seed", seed, "Seed for sampled cycles and face probes");
  add_common(diagnose);

  ScenarioFlags f;
  auto* scenario = app.add_subcommand("scenario", "Run a generated scenario and emit its report");
  scenario->add_option("kind", f.kind, "gs, sphere, shells, monge, gw or twomap")->required();
  scenario->add_option("--seed", f.seed, "Random seed");
  scenario->add_option("--n", f.n, "Atoms per marginal (X atoms for gw, k for twomap)");
  scenario->add_option("--d", f.d, "Ambient dimension");
  scenario->add_option("--marginals", f.marginals, "Number of marginals (gs)");
  scenario->add_option("--batch", f.batch, "Run seeds seed..seed+batch-1");
  scenario->add_option("--mirror-pairs", f.mirror_pairs, "Mirror pairs on the sphere");
  scenario->add_option("--equator", f.equator, "Equatorial sphere atoms");
  scenario->add_option("--shells", f.shells, "Increasing shell radii, e.g. 1,1.5,2");
  scenario->add_option("--atoms-per-shell", f.atoms_per_shell, "Atoms on each shell");
  scenario->add_option("--target-atoms", f.target_atoms, "Y atoms (gw)");
  scenario->add_option("--trials", f.trials, "Random twist trials (gw)");
  scenario->add_option("--xi", f.xi, "Fixed xi (gw)");
  scenario->add_option("--alpha", f.alpha, "Split weights of the first map pair (twomap)");
  scenario->add_option("--beta", f.beta, "Split weights of the second map pair (twomap)");
  scenario->add_flag("--touching", f.touching, "Let X and Y overlap (monge)");
  scenario->add_option("--max-cycle", f.max_cycle, "Longest exhaustive cycle")->check(CLI::Range(2, 8));
  scenario->add_option("--csv-dir", f.csv_dir, "Directory for CSV side tables");
  add_common(scenario);

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    app.parse(std::move(rest));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (solve->parsed()) return cmd_solve(path, oracle, common, out);
    if (reduce->parsed()) return cmd_reduce(path, subset, report_path, common, out);
    if (diagnose->parsed()) return cmd_diagnose(path, split, max_cycle, seed, common, out);
    return cmd_scenario(f, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? kExitValidation : kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace momt::cli
