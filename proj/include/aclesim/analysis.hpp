#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "aclesim/tds.hpp"

namespace aclesim {

struct LosDetection {
    bool tripped = false;
    double time = 0.0; ///< first crossing, s
};

/// Latching first-swing criterion on the recorded max pairwise separation.
LosDetection detect_loss_of_synchronism(const SimulationTrace& trace,
                                        double threshold = std::numbers::pi);

struct CctOptions {
    double resolution_s = 1e-3;
    double bracket_start_s = 0.1;
    double bracket_max_s = 2.0;
};

struct CctResult {
    double cct_s = 0.0;
    double bracket_lo_s = 0.0; ///< last confirmed-stable clearing duration
    double bracket_hi_s = 0.0; ///< first confirmed-unstable clearing duration
    bool beyond_cap = false;   ///< stable for every duration up to the cap
    int runs = 0;
    std::vector<std::string> run_log; ///< one line per probe
};

/// Stability probe: true when the system survives the given clearing
/// duration. Durations are multiples of the bisection resolution.
using StabilityProbe = std::function<bool(double)>;

/// Bracket by doubling from bracket_start_s (capped), then bisect to
/// resolution. The final bracket endpoints are re-probed to confirm the
/// labels. Throws SolverError when even a zero-duration fault is unstable.
CctResult compute_cct(const StabilityProbe& probe, const CctOptions& opt = {});

/// Copy of the scenario with the FaultClear event of the given circuit moved
/// to its FaultOn time plus `duration_s`.
Scenario with_clearing_duration(const Scenario& base, const std::string& circuit_id,
                                double duration_s);

bool run_is_stable(const Scenario& sc, std::string* termination_name = nullptr);

/// Full-pipeline CCT for the faulted circuit of the scenario.
CctResult compute_cct(const Scenario& base, const std::string& faulted_circuit,
                      const CctOptions& opt = {});

/// Scenario variants for the sweep: ACLE with the given (K, T), and the
/// matching constant-P case whose setpoint equals the ACLE initial flow.
Scenario acle_case(const Scenario& base, double k, double t_filter);
Scenario constant_p_case(const Scenario& base, double k);

/// Algebraic steady state after tripping a circuit: ACLE-consistent power
/// flow on the reduced network with the loads frozen at the pre-trip point,
/// the slack mismatch shared by governor droop, and the PV setpoints shifted
/// by the static-exciter droop. This is the reference the dynamic simulation
/// should settle to.
AcleOperatingPoint post_trip_equilibrium(const Scenario& base, const std::string& circuit_id);

struct SweepCell {
    std::string case_name; ///< "acle" or "constant_p"
    double k = 0.0;        ///< pu/rad, converter base
    double t_filter = 0.0; ///< s (unused for constant_p)
    CctResult cct;
    bool failed = false;
    std::string error;
};

struct CctSweepResult {
    std::vector<double> k_list;
    std::vector<double> t_grid;
    std::vector<SweepCell> baselines; ///< one constant-P cell per K
    std::vector<SweepCell> cells;     ///< row-major: k index outer, T index inner
};

/// One constant-P baseline per K (same initial flow as the ACLE case) plus
/// the full (K, T) grid. Cells run in parallel on `jobs` workers; the result
/// layout is by grid index, independent of completion order.
CctSweepResult sweep_cct(const Scenario& base, const std::string& faulted_circuit,
                         const std::vector<double>& k_list, const std::vector<double>& t_grid,
                         const CctOptions& opt = {}, int jobs = 1);

void write_sweep_csv(const CctSweepResult& sweep, std::ostream& os);

/// (T_s, cct_ms) series of one K row, for direct plotting.
void write_case_series(const CctSweepResult& sweep, size_t k_index, std::ostream& os);

} // namespace aclesim
