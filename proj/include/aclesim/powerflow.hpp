#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aclesim/netsolve.hpp"
#include "aclesim/network.hpp"

namespace aclesim {

enum class ConverterDirection { Rectifier, Inverter };

/// Quadratic converter loss model, pu on converter base. The quadratic
/// coefficient depends on the power direction.
struct ConverterLossModel {
    double a = 0.0;
    double b = 0.0;
    double c_rec = 0.0;
    double c_inv = 0.0;

    double evaluate(double i_s, ConverterDirection dir) const {
        const double c = dir == ConverterDirection::Rectifier ? c_rec : c_inv;
        return a + b * i_s + c * i_s * i_s;
    }
};

enum class ConverterControl { ActivePower, DcVoltage };

/// Converter description as seen by the steady-state solvers.
struct ConverterSpec {
    std::string name;
    int ac_bus = 0;     ///< PCC bus id
    int dc_bus = 0;     ///< DC bus id
    double s_rated_mva = 1000.0;
    double r_s = 0.02;  ///< connection resistance, pu converter base
    ConverterControl control = ConverterControl::ActivePower;
    double p_set = 0.0;    ///< pu converter base, AC-side injection (P mode)
    double q_set = 0.0;    ///< pu converter base
    double u_dc_set = 1.0; ///< pu (DC-voltage mode)
    ConverterLossModel loss;
};

struct DcLineSpec {
    int from = 0;
    int to = 0;
    double r_ohm = 0.0;
    double l_henry = 0.0;
};

struct DcGridSpec {
    std::vector<int> bus_ids;
    std::vector<double> c_farad; ///< equivalent DC-bus capacitance, per bus
    std::vector<DcLineSpec> lines;
    double u_base_kv = 640.0; ///< pole-to-pole
    double p_base_mw = 1000.0;

    double z_base_ohm() const { return u_base_kv * u_base_kv / p_base_mw; }
    int index_of(int bus_id) const;
};

struct GeneratorDispatch {
    std::string name;
    int bus = 0;
    double p_mw = 0.0;
    double v_set = 1.0;
    double participation = 0.0; ///< distributed-slack weight
};

/// Fixed PQ injection at a bus (used for converter PCC injections).
struct PqInjection {
    int bus = 0;
    double p_mw = 0.0;
    double q_mvar = 0.0;
};

struct BranchFlow {
    std::string circuit_id;
    double p_from_mw = 0.0;
    double q_from_mvar = 0.0;
    double p_to_mw = 0.0;
    double q_to_mvar = 0.0;
};

struct AcPowerFlowOptions {
    double tol = 1e-10;
    int max_iter = 30;
    bool distributed_slack = false;
    /// Frozen (dynamic) load models instead of constant PQ; indexed like
    /// NetworkModel::loads.
    const std::vector<FrozenLoad>* frozen_loads = nullptr;
};

struct AcSolution {
    Eigen::VectorXd v_mag;
    Eigen::VectorXd v_ang;
    Eigen::VectorXd p_inj_mw;  ///< net injection per bus (calc)
    Eigen::VectorXd q_inj_mvar;
    std::vector<BranchFlow> flows;
    int iterations = 0;
    double mismatch = 0.0;
    double slack_shift_mw = 0.0;

    Complex voltage(int idx) const { return std::polar(v_mag(idx), v_ang(idx)); }
};

AcSolution solve_ac_powerflow(const NetworkModel& net, const std::vector<GeneratorDispatch>& gens,
                              const std::vector<PqInjection>& injections,
                              const AcPowerFlowOptions& opt = {});

struct DcSolution {
    Eigen::VectorXd u;      ///< pu, by DC-bus index
    Eigen::VectorXd i_line; ///< pu, positive from->to
    int iterations = 0;
    double mismatch = 0.0;
};

/// Steady-state DC network: resistive lines, one voltage-controlling
/// converter (slack), fixed power injections elsewhere.
DcSolution solve_dc_network(const DcGridSpec& grid, int slack_bus_id, double u_slack,
                            const std::vector<std::pair<int, double>>& p_inj_pu,
                            double tol = 1e-10, int max_iter = 30);

struct ConverterOperatingPoint {
    std::string name;
    int ac_bus = 0;
    double p_s = 0.0; ///< pu converter base, injection into AC grid at PCC
    double q_s = 0.0;
    double p_c = 0.0; ///< internal AC-side injection (p_s + reactor loss)
    double p_loss = 0.0;
    double p_dc = 0.0;
    double i_s = 0.0;
    double u_s = 0.0;
    double delta_s = 0.0; ///< rad
    double u_dc = 0.0;
};

struct PowerFlowSolution {
    AcSolution ac;
    std::vector<ConverterOperatingPoint> converters;
    DcSolution dc;
    int outer_iterations = 0;
};

struct HvdcLinkSpec {
    std::vector<ConverterSpec> converters; ///< exactly one in DcVoltage mode
    DcGridSpec dc;
};

/// Sequential AC/DC power flow: alternate AC solution, converter loss and
/// DC-coupling evaluation, and DC solution until the DC-slack converter's
/// AC injection settles.
PowerFlowSolution sequential_acdc_powerflow(const NetworkModel& net,
                                            const std::vector<GeneratorDispatch>& gens,
                                            const HvdcLinkSpec& hvdc,
                                            const AcPowerFlowOptions& opt = {},
                                            double outer_tol = 1e-8, int outer_max = 20);

struct AcleOperatingPoint {
    PowerFlowSolution pf;
    double p_s1_ini = 0.0;    ///< pu converter base, AC injection of converter 1
    double delta_s1_0 = 0.0;  ///< rad, PCC angles at the operating point
    double delta_s2_0 = 0.0;
    int iterations = 0;
};

/// Fixed point of p_s1 = p_cons - K*(delta_s1 - delta_s2) jointly with the
/// sequential power flow. K in pu/rad on converter base; damped update.
AcleOperatingPoint acle_operating_point(const NetworkModel& net,
                                        const std::vector<GeneratorDispatch>& gens,
                                        const HvdcLinkSpec& hvdc, double k_conv, double p_cons,
                                        const AcPowerFlowOptions& opt = {}, double damping = 0.7,
                                        double tol = 1e-9, int max_iter = 200);

/// Controller gain from emulated reactance: K_sys = 1/x, rebased to the
/// converter rating.
double gain_from_reactance(double x_hvdc_pu_sys, double s_sys_mva, double s_conv_mva);

/// Frozen dynamic load models (constant-current P, constant-admittance Q)
/// at the given solved operating point.
std::vector<FrozenLoad> freeze_loads(const NetworkModel& net, const AcSolution& sol);

} // namespace aclesim
