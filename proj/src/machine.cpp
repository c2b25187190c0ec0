#include "aclesim/machine.hpp"

#include <cmath>
#include <numbers>

namespace aclesim {

namespace {
inline Complex dq_to_net(Complex f_dq, double delta) {
    return f_dq * std::polar(1.0, delta - std::numbers::pi / 2.0);
}

inline Complex net_to_dq(Complex f_net, double delta) {
    return f_net * std::polar(1.0, -(delta - std::numbers::pi / 2.0));
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }
} // namespace

void MachineState::to_array(double* a) const {
    a[0] = delta;
    a[1] = omega;
    a[2] = eq_p;
    a[3] = ed_p;
    a[4] = efd;
    a[5] = pm;
    a[6] = pss_xw;
    a[7] = pss_x1;
    a[8] = pss_x2;
}

MachineState MachineState::from_array(const double* a) {
    MachineState s;
    s.delta = a[0];
    s.omega = a[1];
    s.eq_p = a[2];
    s.ed_p = a[3];
    s.efd = a[4];
    s.pm = a[5];
    s.pss_xw = a[6];
    s.pss_x1 = a[7];
    s.pss_x2 = a[8];
    return s;
}

DqCurrents Machine::stator_currents(const MachineState& s, Complex v_term) const {
    const Complex v_dq = net_to_dq(v_term, s.delta);
    const double vd = v_dq.real(), vq = v_dq.imag();
    // [ra  -x'q] [i_d]   [e'd - v_d]
    // [x'd  ra ] [i_q] = [e'q - v_q]
    const double a = params.ra, b = -params.xq_p;
    const double c = params.xd_p, d = params.ra;
    const double det = a * d - b * c;
    const double r1 = s.ed_p - vd, r2 = s.eq_p - vq;
    return {(d * r1 - b * r2) / det, (a * r2 - c * r1) / det};
}

double Machine::electrical_power(const MachineState& s, const DqCurrents& i) const {
    return s.ed_p * i.i_d + s.eq_p * i.i_q + (params.xq_p - params.xd_p) * i.i_d * i.i_q;
}

double Machine::pss_output(const MachineState& s) const {
    if (!controls.pss.enabled)
        return 0.0;
    const auto& p = controls.pss;
    const double yw = p.ks * s.omega - s.pss_xw;
    const double y1 = s.pss_x1 + (p.t1 / p.t2) * (yw - s.pss_x1);
    const double y2 = s.pss_x2 + (p.t3 / p.t4) * (y1 - s.pss_x2);
    return clamp(y2, p.out_min, p.out_max);
}

MachineState Machine::derivatives(const MachineState& s, Complex v_term, double omega_s) const {
    MachineState d{};
    const DqCurrents i = stator_currents(s, v_term);
    const double pe = electrical_power(s, i);

    d.delta = omega_s * s.omega;
    d.omega = (s.pm - pe - params.d * s.omega) / (2.0 * params.h);
    d.eq_p = (s.efd - s.eq_p - (params.xd - params.xd_p) * i.i_d) / params.td0_p;
    d.ed_p = (-s.ed_p + (params.xq - params.xq_p) * i.i_q) / params.tq0_p;

    // PSS
    if (controls.pss.enabled) {
        const auto& p = controls.pss;
        const double yw = p.ks * s.omega - s.pss_xw;
        const double y1 = s.pss_x1 + (p.t1 / p.t2) * (yw - s.pss_x1);
        d.pss_xw = yw / p.tw;
        d.pss_x1 = (yw - s.pss_x1) / p.t2;
        d.pss_x2 = (y1 - s.pss_x2) / p.t4;
    }

    // Exciter (static, non-windup limit)
    if (controls.exciter.enabled) {
        const auto& e = controls.exciter;
        const double verr = refs.v_ref - std::abs(v_term) + pss_output(s);
        double defd = (e.ka * verr - s.efd) / e.ta;
        if ((s.efd >= e.efd_max && defd > 0.0) || (s.efd <= e.efd_min && defd < 0.0))
            defd = 0.0;
        d.efd = defd;
    }

    // Governor (droop + servo, non-windup limit)
    if (controls.governor.enabled) {
        const auto& g = controls.governor;
        const double pref = refs.p0 - s.omega / g.droop;
        double dpm = (clamp(pref, g.pm_min, g.pm_max) - s.pm) / g.tg;
        if ((s.pm >= g.pm_max && dpm > 0.0) || (s.pm <= g.pm_min && dpm < 0.0))
            dpm = 0.0;
        d.pm = dpm;
    }
    return d;
}

Complex Machine::norton_admittance() const {
    return 1.0 / Complex(params.ra, params.xd_p);
}

Complex Machine::terminal_current(const MachineState& s, Complex v_term) const {
    const DqCurrents i = stator_currents(s, v_term);
    return dq_to_net(Complex(i.i_d, i.i_q), s.delta);
}

Complex Machine::norton_source(const MachineState& s, Complex v_term) const {
    return terminal_current(s, v_term) + norton_admittance() * v_term;
}

MachineState Machine::initialize(Complex v_term, Complex s_term) {
    MachineState st{};
    const Complex i_term = std::conj(s_term / v_term);
    const Complex eq_axis = v_term + Complex(params.ra, params.xq) * i_term;
    st.delta = std::arg(eq_axis);
    const Complex v_dq = net_to_dq(v_term, st.delta);
    const Complex i_dq = net_to_dq(i_term, st.delta);
    const double vd = v_dq.real(), vq = v_dq.imag();
    const double id = i_dq.real(), iq = i_dq.imag();
    st.ed_p = vd + params.ra * id - params.xq_p * iq;
    st.eq_p = vq + params.ra * iq + params.xd_p * id;
    st.efd = st.eq_p + (params.xd - params.xd_p) * id;
    st.omega = 0.0;
    st.pm = electrical_power(st, {id, iq});

    if (controls.exciter.enabled) {
        if (st.efd > controls.exciter.efd_max || st.efd < controls.exciter.efd_min)
            throw DataError("machine " + params.name + ": required field voltage " +
                            std::to_string(st.efd) + " outside exciter limits");
        refs.v_ref = std::abs(v_term) + st.efd / controls.exciter.ka;
    } else {
        refs.v_ref = std::abs(v_term);
    }
    if (controls.governor.enabled &&
        (st.pm > controls.governor.pm_max || st.pm < controls.governor.pm_min))
        throw DataError("machine " + params.name + ": dispatch " + std::to_string(st.pm) +
                        " pu outside mechanical power limits");
    refs.p0 = st.pm;
    return st;
}

} // namespace aclesim
