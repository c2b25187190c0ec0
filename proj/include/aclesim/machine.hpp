#pragma once

#include <string>

#include "aclesim/network.hpp"

namespace aclesim {

struct MachineParams {
    std::string name;
    int bus = 0;
    double rated_mva = 900.0;
    double h = 4.5;  ///< s, machine base
    double d = 0.0;  ///< pu damping
    double xd = 1.8, xq = 1.7;
    double xd_p = 0.3, xq_p = 0.55;
    double xd_pp = 0.25, xq_pp = 0.25; ///< carried for completeness, unused by the two-axis model
    double xl = 0.2;
    double td0_p = 8.0, tq0_p = 0.4;
    double td0_pp = 0.03, tq0_pp = 0.05;
    double ra = 0.0025;
};

struct ExciterParams {
    bool enabled = true;
    double ka = 200.0;
    double ta = 0.01;
    double efd_min = -6.0;
    double efd_max = 6.0;
};

struct PssParams {
    bool enabled = true;
    double ks = 20.0;
    double tw = 10.0;
    double t1 = 0.05, t2 = 0.02;
    double t3 = 3.0, t4 = 5.4;
    double out_min = -0.2, out_max = 0.2;
};

struct GovernorParams {
    bool enabled = true;
    double droop = 0.05; ///< pu machine base
    double tg = 0.5;
    double pm_min = 0.0, pm_max = 1.0;
};

struct ControlChain {
    ExciterParams exciter;
    PssParams pss;
    GovernorParams governor;
};

struct MachineState {
    double delta = 0.0; ///< rad
    double omega = 0.0; ///< pu speed deviation
    double eq_p = 0.0;
    double ed_p = 0.0;
    double efd = 0.0;
    double pm = 0.0;
    double pss_xw = 0.0; ///< washout state
    double pss_x1 = 0.0; ///< lead-lag stage states
    double pss_x2 = 0.0;

    static constexpr int size = 9;
    void to_array(double* a) const;
    static MachineState from_array(const double* a);
};

/// Setpoints back-computed at initialization.
struct MachineRefs {
    double v_ref = 1.0;
    double p0 = 0.0; ///< scheduled mechanical power, pu machine base
};

struct DqCurrents {
    double i_d = 0.0;
    double i_q = 0.0;
};

class Machine {
  public:
    MachineParams params;
    ControlChain controls;
    MachineRefs refs;

    /// Stator currents from the state and terminal voltage (machine base pu);
    /// exact 2x2 solve of the two-axis stator equations.
    DqCurrents stator_currents(const MachineState& s, Complex v_term) const;

    /// Air-gap electrical power, machine base pu.
    double electrical_power(const MachineState& s, const DqCurrents& i) const;

    MachineState derivatives(const MachineState& s, Complex v_term, double omega_s) const;

    /// Norton shunt admittance (1/(ra + j x'd)), machine base pu.
    Complex norton_admittance() const;

    /// Norton source current such that injection = source - Y*v matches the
    /// stator solution, machine base pu in the network frame.
    Complex norton_source(const MachineState& s, Complex v_term) const;

    /// Terminal current injection into the network, machine base pu.
    Complex terminal_current(const MachineState& s, Complex v_term) const;

    /// Back-initialization from a solved operating point (system quantities
    /// already converted to machine base pu).
    MachineState initialize(Complex v_term, Complex s_term);

    double pss_output(const MachineState& s) const;
};

} // namespace aclesim
