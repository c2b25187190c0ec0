#include "aclesim/vsc.hpp"

#include <cmath>

namespace aclesim {

namespace {
constexpr double kLvThreshold = 0.05;
inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
} // namespace

VscReferences outer_control(const VscParams& p, double p_ref, double u_s, double u_dc,
                            VscState& state, VscFlags& flags) {
    VscReferences refs;
    const bool lv = u_s < kLvThreshold;
    flags.lv_hold = lv;
    state.lv_hold = lv;

    if (p.d_mode == ConverterControl::ActivePower) {
        const double p_lim = clamp(p_ref, -p.limits.p_max, p.limits.p_max);
        refs.d_clipped = p_lim != p_ref;
        if (lv) {
            refs.i_d_ref = state.held_id_ff;
        } else {
            refs.i_d_ref = p_lim / u_s;
            state.held_id_ff = refs.i_d_ref;
        }
    } else {
        refs.i_d_ref = p.kp_udc * (u_dc - p.u_dc_set) + state.xi_dc;
    }

    const double q_lim = clamp(p.q_set, -p.limits.q_max, p.limits.q_max);
    if (lv) {
        refs.i_q_ref = state.held_iq_ff;
    } else {
        refs.i_q_ref = -q_lim / u_s;
        state.held_iq_ff = refs.i_q_ref;
    }
    return refs;
}

VscReferences enforce_limits(const VscParams& p, VscReferences refs, VscFlags& flags) {
    const double imax = p.limits.i_max;
    VscReferences out = refs;
    if (std::abs(out.i_d_ref) > imax) {
        out.i_d_ref = std::copysign(imax, out.i_d_ref);
        out.d_clipped = true;
        flags.current_limited = true;
    }
    const double iq_room = std::sqrt(std::max(0.0, imax * imax - out.i_d_ref * out.i_d_ref));
    if (std::abs(out.i_q_ref) > iq_room) {
        out.i_q_ref = std::copysign(iq_room, out.i_q_ref);
        flags.current_limited = true;
    }
    return out;
}

VscDerivatives vsc_dynamics(const VscParams& p, const VscState& s, const VscReferences& refs,
                            double u_dc) {
    VscDerivatives d;
    d.di_d = (refs.i_d_ref - s.i_d) / p.tau;
    d.di_q = (refs.i_q_ref - s.i_q) / p.tau;
    if (p.d_mode == ConverterControl::DcVoltage) {
        // Anti-windup: stop integrating while the d-axis reference is clipped.
        d.dxi_dc = refs.d_clipped ? 0.0 : p.ki_udc * (u_dc - p.u_dc_set);
    }
    return d;
}

DcCoupling dc_coupling(const VscParams& p, const VscState& s, double u_s, double u_dc,
                       double dc_p_base_mw) {
    if (u_dc <= 0.2)
        throw DcCollapseError("DC voltage collapse at converter " + p.name + " (u_dc = " +
                              std::to_string(u_dc) + " pu)");
    DcCoupling c;
    c.p_s = u_s * s.i_d;
    c.q_s = -u_s * s.i_q;
    const double i2 = s.i_d * s.i_d + s.i_q * s.i_q;
    c.p_c = c.p_s + p.r_s * i2;
    const auto dir = c.p_c < 0.0 ? ConverterDirection::Rectifier : ConverterDirection::Inverter;
    c.p_loss = p.loss.evaluate(std::sqrt(i2), dir);
    c.p_dc = -(c.p_c + c.p_loss);
    c.i_dc = (c.p_dc * p.s_rated_mva / dc_p_base_mw) / u_dc;
    return c;
}

Complex vsc_current_injection(const VscParams& p, const VscState& s, Complex v_pcc,
                              double s_sys_mva) {
    const double vm = std::abs(v_pcc);
    if (vm < 1e-6)
        return {0.0, 0.0};
    const Complex dir = v_pcc / vm;
    // Converter-base current (i_d + j i_q) in the PCC-voltage frame; system
    // base current scales with the MVA ratio.
    return Complex(s.i_d, s.i_q) * dir * (p.s_rated_mva / s_sys_mva);
}

bool modulation_within_limit(const VscParams& p, const VscState& s, double u_s, double u_dc,
                             double u_dc_base_kv) {
    const Complex u_c = Complex(u_s, 0.0) + Complex(p.r_s, p.x_s) * Complex(s.i_d, s.i_q);
    const double limit =
        p.limits.m_max * (u_dc * u_dc_base_kv / 2.0) * (2.0 / std::sqrt(3.0)) / p.ac_kv;
    return std::abs(u_c) <= limit;
}

DcGridDerivatives dc_grid_derivatives(const DcGridSpec& grid, const DcGridState& s,
                                      const Eigen::VectorXd& i_inj) {
    const int n = static_cast<int>(grid.bus_ids.size());
    const int m = static_cast<int>(grid.lines.size());
    DcGridDerivatives d;
    d.du.setZero(n);
    d.di.setZero(m);
    const double zb = grid.z_base_ohm();
    Eigen::VectorXd i_net = i_inj;
    for (int k = 0; k < m; ++k) {
        const auto& ln = grid.lines[k];
        const int f = grid.index_of(ln.from);
        const int t = grid.index_of(ln.to);
        i_net(f) -= s.i_line(k);
        i_net(t) += s.i_line(k);
        const double l_sec = ln.l_henry / zb;
        const double r_pu = ln.r_ohm / zb;
        d.di(k) = (s.u(f) - s.u(t) - r_pu * s.i_line(k)) / l_sec;
    }
    for (int i = 0; i < n; ++i) {
        const double c_sec = grid.c_farad[i] * zb;
        d.du(i) = i_net(i) / c_sec;
    }
    return d;
}

} // namespace aclesim
