#include "aclesim/manifest.hpp"

#include <json.hpp>

namespace aclesim {

void write_manifest(const RunManifest& m, std::ostream& os) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["scenario"] = m.scenario_path;
    j["scenario_hash"] = m.scenario_hash;
    j["overrides"] = m.overrides;
    j["outputs"] = m.outputs;
    j["version"] = m.version;
    os << j.dump(2) << "\n";
}

} // namespace aclesim
