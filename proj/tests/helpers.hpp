#pragma once

#include <string>

#include "aclesim/scenario.hpp"

namespace testutil {

inline std::string bundled_scenario_path() {
    return std::string(ACLESIM_DATA) + "/kundur_two_area_hvdc.scn";
}

inline aclesim::Scenario bundled_scenario() {
    return aclesim::load_scenario_file(bundled_scenario_path());
}

} // namespace testutil
