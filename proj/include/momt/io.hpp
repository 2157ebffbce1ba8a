#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "momt/instance.hpp"
#include "momt/lp.hpp"

namespace momt::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Audit trail carried by reduced instances.
struct Provenance {
  std::string parent_hash;  // FNV-1a of the parent file text, hex
  std::vector<int> subset;  // 1-based axes of the parent
  std::string gauge;
  std::vector<std::vector<double>> potentials;  // parent potentials used for the reduction
};

// The on-disk instance, kept verbatim (zero-weight atoms included) so that
// load followed by save reproduces the file.
struct InstanceFile {
  std::vector<DiscreteMeasure> marginals;
  costs::CostSpec cost;
  std::optional<Provenance> provenance;
};

// Throws Error(kSchemaError) naming the offending field (JSON pointer) or,
// for syntax errors, the line and column.
InstanceFile parse_instance(std::string_view text);
json instance_json(const InstanceFile& file);
std::string dump_instance(const InstanceFile& file);

DiscreteInstance to_instance(const InstanceFile& file);
InstanceFile from_instance(const DiscreteInstance& instance);

// Pretty-printed JSON with a trailing newline. Doubles are written in the
// shortest form that parses back to the same bits.
std::string dump(const json& value);

std::string read_text(const std::string& path);
void write_text(const std::string& path, std::string_view text);

std::string fnv1a_hex(std::string_view text);

json support_json(const Coupling& plan);
json potentials_json(const Potentials& potentials);
Coupling coupling_from_json(const json& support, std::vector<int> arities);

}  // namespace momt::io
