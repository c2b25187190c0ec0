#pragma once

#include "aclesim/powerflow.hpp"

namespace aclesim {

enum class AcleMode { ConstantP, AcLineEmulation };

struct AcleSettings {
    AcleMode mode = AcleMode::ConstantP;
    double p_cons = 0.0; ///< pu converter base
    double k = 0.0;      ///< pu/rad, converter base
    double t_filter = 0.75;
    double p_max = 1.0;  ///< setpoint clamp, pu converter base
};

struct AcleState {
    double y = 0.0;          ///< filter output, pu
    double p_s1_ini = 0.0;   ///< pu converter base
    double delta_ref[2] = {0.0, 0.0}; ///< initial PCC angles, rad
    // Unwrap bookkeeping per terminal.
    double prev_raw[2] = {0.0, 0.0};
    double acc[2] = {0.0, 0.0};
    double prev_diff = 0.0;  ///< previous filter input (trapezoidal rule)
    bool held[2] = {false, false};
    bool initialized = false;
};

/// Unwrapped angle increments relative to the stored initial angles;
/// de-energized terminals hold their last valid measurement.
double measure_angle_difference(Complex v_pcc1, Complex v_pcc2, AcleState& state);

/// Advance the first-order filter by one step (trapezoidal rule; T = 0 is
/// pass-through) and return the active-power reference for converter 1.
double acle_update(AcleState& state, double angle_difference, const AcleSettings& settings,
                   double dt);

/// Reference stored without advancing the filter (constant-P mode or t = 0).
double acle_reference(const AcleState& state, const AcleSettings& settings);

AcleState init_acle(const AcleOperatingPoint& op, const AcleSettings& settings);

} // namespace aclesim
