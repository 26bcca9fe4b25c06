#pragma once

#include "nasp/energy.hpp"
#include "nasp/nasp.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace nasp {

using Json = nlohmann::json;

/// A problem file: either an energy instance (the NASP is built from it) or
/// a raw NASP in dense matrix form.
struct InstanceFile {
  std::optional<EnergyInstance> energy;
  Nasp nasp;
};

Json to_json(const Nasp& n);
Nasp nasp_from_json(const Json& j);

Json to_json(const EnergyInstance& inst);
EnergyInstance energy_from_json(const Json& j);

Json instance_to_json(const InstanceFile& f);
InstanceFile instance_from_json(const Json& j);

struct ResultMeta {
  std::string algorithm;
  std::string strategy;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  bool select = false;
  bool timing = false;  ///< include wall time (breaks byte determinism)
};

Json result_to_json(const SolveReport& r, const ResultMeta& meta);
/// Status and profile of a result file.
SolveReport result_from_json(const Json& j);

Json to_json(const EnergyReport& r);

/// Throws InvalidInstance on unreadable files or malformed JSON.
Json read_json_file(const std::string& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);
std::string dump(const Json& j);

}  // namespace nasp
