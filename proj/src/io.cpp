#include "momt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "momt/error.hpp"

namespace momt::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, where + ": " + what);
}

const json& field(const json& object, const char* key, const std::string& where) {
  if (!object.is_object()) fail(where, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) fail(where + "/" + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite number");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<double>> matrix(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(numbers(v[i], where + "/" + std::to_string(i)));
  return out;
}

void read_tensor(const json& v, const std::vector<int>& arities, std::size_t depth, const std::string& where,
                 std::vector<double>& out) {
  if (!v.is_array() || static_cast<int>(v.size()) != arities[depth]) {
    fail(where, "tensor shape differs from the weights (expected " + std::to_string(arities[depth]) + " entries)");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = where + "/" + std::to_string(i);
    if (depth + 1 == arities.size()) {
      out.push_back(number(v[i], at));
    } else {
      read_tensor(v[i], arities, depth + 1, at, out);
    }
  }
}

json write_tensor(const costs::CostTensor& t, std::size_t depth, std::size_t& pos) {
  json out = json::array();
  const int n = t.grid.arities()[depth];
  for (int i = 0; i < n; ++i) {
    if (depth + 1 == t.grid.arities().size()) {
      out.push_back(t.values[pos++]);
    } else {
      out.push_back(write_tensor(t, depth + 1, pos));
    }
  }
  return out;
}

}  // namespace

InstanceFile parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kSchemaError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  if (!doc.is_object()) fail("", "expected a top-level object");
  const json& version = field(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    fail("/version", "unsupported schema version (expected 1)");
  }

  InstanceFile file;
  const json& spaces = field(doc, "spaces", "");
  const json& weights = field(doc, "weights", "");
  if (!spaces.is_array() || spaces.empty()) fail("/spaces", "expected a nonempty array");
  if (!weights.is_array() || weights.size() != spaces.size()) fail("/weights", "expected one weight vector per space");
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    const std::string where = "/spaces/" + std::to_string(k);
    const json& name = field(spaces[k], "name", where);
    if (!name.is_string()) fail(where + "/name", "expected a string");
    DiscreteMeasure m;
    m.space.name = name.get<std::string>();
    m.space.points = matrix(field(spaces[k], "points", where), where + "/points");
    m.weights = numbers(weights[k], "/weights/" + std::to_string(k));
    if (m.weights.size() != m.space.points.size()) {
      fail("/weights/" + std::to_string(k), "weight count differs from point count");
    }
    file.marginals.push_back(std::move(m));
  }

  const json& sense = field(doc, "sense", "");
  if (sense == "min") {
    file.cost.sense = Sense::kMin;
  } else if (sense == "max") {
    file.cost.sense = Sense::kMax;
  } else {
    fail("/sense", "expected \"min\" or \"max\"");
  }

  const json& cost = field(doc, "cost", "");
  if (!cost.is_object()) fail("/cost", "expected an object");
  if (cost.contains("tensor")) {
    std::vector<int> arities;
    for (const auto& m : file.marginals) arities.push_back(m.size());
    costs::CostTensor t{Grid(arities), {}};
    read_tensor(cost["tensor"], arities, 0, "/cost/tensor", t.values);
    file.cost.kind = costs::CostKind::kTensor;
    file.cost.tensor = std::make_shared<const costs::CostTensor>(std::move(t));
  } else {
    const json& builtin = field(cost, "builtin", "/cost");
    if (!builtin.is_string()) fail("/cost/builtin", "expected a string");
    try {
      file.cost.kind = costs::kind_from_name(builtin.get<std::string>());
    } catch (const Error&) {
      fail("/cost/builtin", "unknown cost '" + builtin.get<std::string>() + "'");
    }
    if (file.cost.kind == costs::CostKind::kTensor || file.cost.kind == costs::CostKind::kCustom) {
      fail("/cost/builtin", "not a builtin cost");
    }
    if (cost.contains("params")) {
      const json& params = cost["params"];
      if (!params.is_object()) fail("/cost/params", "expected an object");
      if (params.contains("xi")) file.cost.xi = number(params["xi"], "/cost/params/xi");
      if (params.contains("matrix")) file.cost.matrix = matrix(params["matrix"], "/cost/params/matrix");
    }
  }

  if (doc.contains("provenance")) {
    const json& p = doc["provenance"];
    Provenance prov;
    const json& hash = field(p, "parent_hash", "/provenance");
    if (!hash.is_string()) fail("/provenance/parent_hash", "expected a string");
    prov.parent_hash = hash.get<std::string>();
    for (double v : numbers(field(p, "subset", "/provenance"), "/provenance/subset")) {
      prov.subset.push_back(static_cast<int>(v));
    }
    const json& gauge = field(p, "gauge", "/provenance");
    if (!gauge.is_string()) fail("/provenance/gauge", "expected a string");
    prov.gauge = gauge.get<std::string>();
    if (p.contains("potentials")) prov.potentials = matrix(p["potentials"], "/provenance/potentials");
    file.provenance = std::move(prov);
  }

  for (const auto& m : file.marginals) validate_measure(m);
  costs::validate_spec(file.cost, static_cast<int>(file.marginals.size()));
  return file;
}

json instance_json(const InstanceFile& file) {
  json doc;
  doc["version"] = kSchemaVersion;
  json spaces = json::array();
  json weights = json::array();
  for (const auto& m : file.marginals) {
    json s;
    s["name"] = m.space.name;
    s["points"] = m.space.points;
    spaces.push_back(std::move(s));
    weights.push_back(m.weights);
  }
  doc["spaces"] = std::move(spaces);
  doc["weights"] = std::move(weights);
  json cost;
  if (file.cost.kind == costs::CostKind::kTensor) {
    std::size_t pos = 0;
    cost["tensor"] = write_tensor(*file.cost.tensor, 0, pos);
  } else if (file.cost.kind == costs::CostKind::kCustom) {
    throw Error(ErrorCode::kSchemaError, "custom costs cannot be serialized");
  } else {
    cost["builtin"] = std::string(costs::kind_name(file.cost.kind));
    if (file.cost.kind == costs::CostKind::kGromovWasserstein) {
      cost["params"] = {{"xi", file.cost.xi}, {"matrix", file.cost.matrix}};
    }
  }
  doc["cost"] = std::move(cost);
  doc["sense"] = file.cost.sense == Sense::kMin ? "min" : "max";
  if (file.provenance) {
    const Provenance& p = *file.provenance;
    doc["provenance"] = {{"parent_hash", p.parent_hash}, {"subset", p.subset}, {"gauge", p.gauge}};
    if (!p.potentials.empty()) doc["provenance"]["potentials"] = p.potentials;
  }
  return doc;
}

std::string dump_instance(const InstanceFile& file) { return dump(instance_json(file)); }

DiscreteInstance to_instance(const InstanceFile& file) { return DiscreteInstance(file.marginals, file.cost); }

InstanceFile from_instance(const DiscreteInstance& instance) {
  InstanceFile file;
  file.marginals = instance.marginals();
  file.cost = instance.cost();
  return file;
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSchemaError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  out << text;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json support_json(const Coupling& plan) {
  json out = json::array();
  for (const auto& [index, mass] : plan.entries()) out.push_back({{"index", index}, {"mass", mass}});
  return out;
}

json potentials_json(const Potentials& potentials) { return potentials.vectors; }

Coupling coupling_from_json(const json& support, std::vector<int> arities) {
  if (!support.is_array()) fail("/support", "expected an array");
  Coupling plan(std::move(arities));
  for (std::size_t i = 0; i < support.size(); ++i) {
    const std::string where = "/support/" + std::to_string(i);
    const json& index = field(support[i], "index", where);
    if (!index.is_array()) fail(where + "/index", "expected an array");
    plan.add(index.get<MultiIndex>(), number(field(support[i], "mass", where), where + "/mass"));
  }
  return plan;
}

}  // namespace momt::io
