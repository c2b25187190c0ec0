#pragma once

#include <map>
#include <string>
#include <vector>

#include "aclesim/acle.hpp"
#include "aclesim/machine.hpp"
#include "aclesim/network.hpp"
#include "aclesim/powerflow.hpp"
#include "aclesim/vsc.hpp"

namespace aclesim {

enum class Integrator { Rk4Partitioned, TrapezoidalPartitioned };

struct SolverSettings {
    double dt = 1e-3;
    double t_end = 20.0;
    Integrator integrator = Integrator::Rk4Partitioned;
    double network_tol = 1e-10;
    int trace_subsample = 1;
};

struct ScheduledEvent {
    double time = 0.0;
    enum class Kind { Trip, FaultOn, FaultClear, Setpoint } kind = Kind::Trip;
    std::string circuit_id;        ///< topology events
    double fault_admittance = 1e5; ///< FaultOn
    std::string target;            ///< Setpoint: e.g. "acle.p_cons_mw"
    double value = 0.0;
};

struct GenUnit {
    Machine machine;
    double p_mw = 0.0; ///< scheduled dispatch, system MW
};

struct Scenario {
    NetworkModel network;
    std::vector<GenUnit> generators;
    std::vector<VscParams> vscs; ///< converter 1 first (the ACLE-controlled one)
    DcGridSpec dc;
    AcleSettings acle;
    double x_hvdc_info = 0.0; ///< informational emulated reactance, pu system base
    std::vector<ScheduledEvent> events;
    SolverSettings solver;

    std::vector<GeneratorDispatch> dispatch(bool with_participation = false) const;
    /// Steady-state converter view for the power-flow solvers; converter 1's
    /// scheduled power (pu converter base) is supplied by the caller.
    HvdcLinkSpec hvdc_spec(double p_set1) const;
};

/// Ordered raw document: sections of key/value rows, used for parsing and
/// `--set section.key=value` overrides.
struct SectionDoc {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

    std::vector<std::pair<std::string, std::string>>& section(const std::string& name);
    const std::vector<std::pair<std::string, std::string>>* find(const std::string& name) const;
    void set_scalar(const std::string& section_name, const std::string& key,
                    const std::string& value);
};

SectionDoc parse_scenario_text(const std::string& text);
Scenario build_scenario(const SectionDoc& doc);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});
std::string serialize_scenario(const Scenario& sc);

/// Apply "section.key=value" to the raw document (scalar keys only).
void apply_override(SectionDoc& doc, const std::string& spec);

/// FNV-1a hash of the scenario bytes, for run manifests.
std::string content_hash(const std::string& text);

} // namespace aclesim
