#include "aclesim/acle.hpp"

#include <cmath>
#include <numbers>

namespace aclesim {

namespace {
constexpr double kEnergizedThreshold = 0.01;

double wrap_pi(double a) {
    while (a > std::numbers::pi)
        a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi)
        a += 2.0 * std::numbers::pi;
    return a;
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
} // namespace

double measure_angle_difference(Complex v_pcc1, Complex v_pcc2, AcleState& state) {
    if (!state.initialized)
        throw DataError("ACLE measurement before initialization");
    const Complex v[2] = {v_pcc1, v_pcc2};
    for (int i = 0; i < 2; ++i) {
        if (std::abs(v[i]) < kEnergizedThreshold) {
            state.held[i] = true;
            continue; // hold last valid accumulator
        }
        state.held[i] = false;
        const double raw = std::arg(v[i]);
        state.acc[i] += wrap_pi(raw - state.prev_raw[i]);
        state.prev_raw[i] = raw;
    }
    return state.acc[0] - state.acc[1];
}

double acle_reference(const AcleState& state, const AcleSettings& settings) {
    return clamp(state.p_s1_ini - state.y, -settings.p_max, settings.p_max);
}

double acle_update(AcleState& state, double angle_difference, const AcleSettings& settings,
                   double dt) {
    if (dt <= 0.0)
        throw DataError("ACLE update requires dt > 0");
    if (settings.mode == AcleMode::ConstantP) {
        state.y = 0.0;
        state.prev_diff = angle_difference;
        return acle_reference(state, settings);
    }
    const double k = settings.k, t = settings.t_filter;
    if (t == 0.0) {
        state.y = k * angle_difference;
    } else {
        // Trapezoidal discretization of y' = (K*u - y)/T: exact DC gain.
        state.y = ((2.0 * t - dt) * state.y + k * dt * (angle_difference + state.prev_diff)) /
                  (2.0 * t + dt);
    }
    state.prev_diff = angle_difference;
    return acle_reference(state, settings);
}

AcleState init_acle(const AcleOperatingPoint& op, const AcleSettings& settings) {
    AcleState st;
    st.p_s1_ini = op.p_s1_ini;
    st.delta_ref[0] = op.delta_s1_0;
    st.delta_ref[1] = op.delta_s2_0;
    st.prev_raw[0] = wrap_pi(op.delta_s1_0);
    st.prev_raw[1] = wrap_pi(op.delta_s2_0);
    st.acc[0] = st.acc[1] = 0.0;
    st.y = 0.0;
    st.prev_diff = 0.0;
    st.initialized = true;

    const double consistent = settings.mode == AcleMode::AcLineEmulation
                                  ? settings.p_cons - settings.k * (op.delta_s1_0 - op.delta_s2_0)
                                  : settings.p_cons;
    if (std::abs(consistent - op.p_s1_ini) > 1e-6)
        throw DataError("ACLE initialization inconsistent with the power flow (expected " +
                        std::to_string(consistent) + ", got " + std::to_string(op.p_s1_ini) + ")");
    return st;
}

} // namespace aclesim
