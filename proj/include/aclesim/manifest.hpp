#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aclesim {

inline constexpr const char* kToolVersion = "aclesim 1.0.0";

/// Reproducibility record written alongside every output.
struct RunManifest {
    std::string command;
    std::string scenario_path;
    std::string scenario_hash;
    std::vector<std::string> overrides;
    std::vector<std::string> outputs;
    std::string version = kToolVersion;
};

void write_manifest(const RunManifest& m, std::ostream& os);

} // namespace aclesim
