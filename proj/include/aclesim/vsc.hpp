#pragma once

#include <string>
#include <vector>

#include "aclesim/powerflow.hpp"

namespace aclesim {

struct DcCollapseError : SolverError {
    using SolverError::SolverError;
};

struct VscLimits {
    double p_max = 1.0;  ///< pu converter base
    double q_max = 0.45;
    double i_max = 1.0;
    double m_max = 1.31;
    double u_dc_band = 0.10; ///< flagged when exceeded
};

struct VscParams {
    std::string name;
    int ac_bus = 0;
    int dc_bus = 0;
    double s_rated_mva = 1000.0;
    double ac_kv = 300.0;
    double r_s = 0.02, x_s = 0.20; ///< pu converter base
    double tau = 0.005;            ///< inner-loop closure, s
    ConverterControl d_mode = ConverterControl::ActivePower;
    double p_set = 0.0; ///< pu converter base (P mode, when not ACLE-driven)
    double kp_udc = 10.0, ki_udc = 20.0;
    VscLimits limits;
    ConverterLossModel loss;
    double q_set = 0.0;    ///< pu converter base
    double u_dc_set = 1.0; ///< pu (DC-voltage mode)
};

struct VscState {
    double i_d = 0.0;   ///< pu, first-order closed-loop current states
    double i_q = 0.0;
    double xi_dc = 0.0; ///< DC-voltage PI integrator
    // Feedforward hold for low PCC voltage.
    double held_id_ff = 0.0;
    double held_iq_ff = 0.0;
    bool lv_hold = false;

    static constexpr int size = 3; ///< integrated states (i_d, i_q, xi_dc)
};

struct VscFlags {
    bool current_limited = false;
    bool lv_hold = false;
    bool modulation_exceeded = false;
    bool u_dc_out_of_band = false;
};

struct VscReferences {
    double i_d_ref = 0.0;
    double i_q_ref = 0.0;
    bool d_clipped = false; ///< d-axis reference hit a limit (for PI anti-windup)
};

/// Outer controller: d-axis from P feedforward or DC-voltage PI, q-axis
/// from Q feedforward. Feedforward divisions are frozen below 0.05 pu PCC
/// voltage. Updates the hold registers in `state`.
VscReferences outer_control(const VscParams& p, double p_ref, double u_s, double u_dc,
                            VscState& state, VscFlags& flags);

/// Current limiting with d-axis priority.
VscReferences enforce_limits(const VscParams& p, VscReferences refs, VscFlags& flags);

struct VscDerivatives {
    double di_d = 0.0;
    double di_q = 0.0;
    double dxi_dc = 0.0;
};

VscDerivatives vsc_dynamics(const VscParams& p, const VscState& s, const VscReferences& refs,
                            double u_dc);

struct DcCoupling {
    double p_s = 0.0;
    double q_s = 0.0;
    double p_c = 0.0;
    double p_loss = 0.0;
    double p_dc = 0.0;  ///< pu converter base
    double i_dc = 0.0;  ///< pu DC base, injection at the DC bus
};

/// AC-side powers, losses and the DC-bus current injection (Eq. balance
/// p_c + p_loss + p_dc = 0). Aborts on DC voltage collapse.
DcCoupling dc_coupling(const VscParams& p, const VscState& s, double u_s, double u_dc,
                       double dc_p_base_mw);

/// Converter AC current injection at the PCC, system-base pu.
Complex vsc_current_injection(const VscParams& p, const VscState& s, Complex v_pcc,
                              double s_sys_mva);

/// Modulation-index feasibility monitor (flag only).
bool modulation_within_limit(const VscParams& p, const VscState& s, double u_s, double u_dc,
                             double u_dc_base_kv);

struct DcGridState {
    Eigen::VectorXd u;      ///< pu per DC bus
    Eigen::VectorXd i_line; ///< pu per DC line
};

struct DcGridDerivatives {
    Eigen::VectorXd du;
    Eigen::VectorXd di;
};

/// C du/dt = i_inj - sum of outgoing line currents; L di/dt = u_f - u_t - R i.
/// Capacitances/inductances converted to the DC per-unit system (seconds).
DcGridDerivatives dc_grid_derivatives(const DcGridSpec& grid, const DcGridState& s,
                                      const Eigen::VectorXd& i_inj);

} // namespace aclesim
