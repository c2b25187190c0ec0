#include "aclesim/tds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace aclesim {

int SimulationTrace::column(const std::string& name) const {
    for (size_t i = 0; i < channels.size(); ++i)
        if (channels[i] == name)
            return static_cast<int>(i);
    throw DataError("unknown trace channel '" + name + "'");
}

double SimulationTrace::value(size_t step, const std::string& name) const {
    return rows.at(step)[static_cast<size_t>(column(name))];
}

void SimulationTrace::write_csv(std::ostream& os, int subsample) const {
    if (subsample < 1)
        subsample = 1;
    os << "t";
    for (const auto& c : channels)
        os << "," << c;
    os << "\n";
    os << std::setprecision(12);
    for (size_t k = 0; k < time.size(); ++k) {
        if (k % static_cast<size_t>(subsample) != 0 && k + 1 != time.size())
            continue;
        os << time[k];
        for (double v : rows[k])
            os << "," << v;
        os << "\n";
    }
}

namespace {

struct DeviceStates {
    std::vector<MachineState> machines;
    std::vector<VscState> vscs;
    DcGridState dc;
};

} // namespace

struct Simulator::Impl {
    const Scenario* sc = nullptr;
    SimOverrides overrides;

    NetworkModel net; ///< current topology
    std::vector<FrozenLoad> frozen;
    std::vector<Machine> machines;
    std::vector<int> machine_bus_idx;
    std::vector<double> machine_ratio; ///< S_mach / S_sys
    std::vector<VscParams> vscs;
    std::vector<int> vsc_bus_idx;
    std::vector<int> vsc_dc_idx;
    std::vector<VscState> vsc_persistent; ///< carries feedforward hold registers
    DcGridSpec dcgrid;
    AcleSettings acle;
    AcleState acle_state;
    double acle_p_ref = 0.0; ///< held over a step, pu converter base

    std::unique_ptr<NetworkSolver> solver;
    Eigen::VectorXcd last_v;
    double net_tol = 1e-10;
    double omega_s = 2.0 * std::numbers::pi * 50.0;

    Eigen::VectorXd x0;
    size_t next_event = 0;

    int n_states() const {
        return static_cast<int>(machines.size()) * MachineState::size +
               static_cast<int>(vscs.size()) * VscState::size +
               static_cast<int>(dcgrid.bus_ids.size()) +
               static_cast<int>(dcgrid.lines.size());
    }

    DeviceStates unpack(const Eigen::VectorXd& x) const {
        DeviceStates ds;
        int k = 0;
        ds.machines.resize(machines.size());
        for (size_t i = 0; i < machines.size(); ++i) {
            ds.machines[i] = MachineState::from_array(x.data() + k);
            k += MachineState::size;
        }
        ds.vscs = vsc_persistent; // keep hold registers
        for (size_t i = 0; i < vscs.size(); ++i) {
            ds.vscs[i].i_d = x(k);
            ds.vscs[i].i_q = x(k + 1);
            ds.vscs[i].xi_dc = x(k + 2);
            k += VscState::size;
        }
        const int nb = static_cast<int>(dcgrid.bus_ids.size());
        const int nl = static_cast<int>(dcgrid.lines.size());
        ds.dc.u = x.segment(k, nb);
        ds.dc.i_line = x.segment(k + nb, nl);
        return ds;
    }

    void pack(const DeviceStates& ds, Eigen::VectorXd& x) const {
        int k = 0;
        for (const auto& m : ds.machines) {
            m.to_array(x.data() + k);
            k += MachineState::size;
        }
        for (const auto& v : ds.vscs) {
            x(k) = v.i_d;
            x(k + 1) = v.i_q;
            x(k + 2) = v.xi_dc;
            k += VscState::size;
        }
        const int nb = static_cast<int>(dcgrid.bus_ids.size());
        const int nl = static_cast<int>(dcgrid.lines.size());
        x.segment(k, nb) = ds.dc.u;
        x.segment(k + nb, nl) = ds.dc.i_line;
    }

    void rebuild_solver() {
        std::vector<std::pair<int, Complex>> shunts;
        for (size_t i = 0; i < machines.size(); ++i)
            shunts.emplace_back(machine_bus_idx[i],
                                machines[i].norton_admittance() * machine_ratio[i]);
        solver = std::make_unique<NetworkSolver>(build_ybus(net), shunts, frozen);
    }

    NetworkSolution solve_net(const DeviceStates& ds) const {
        auto inject = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& i_src) {
            for (size_t i = 0; i < machines.size(); ++i)
                i_src(machine_bus_idx[i]) +=
                    machines[i].norton_source(ds.machines[i], v(machine_bus_idx[i])) *
                    machine_ratio[i];
            for (size_t i = 0; i < vscs.size(); ++i)
                i_src(vsc_bus_idx[i]) += vsc_current_injection(vscs[i], ds.vscs[i],
                                                               v(vsc_bus_idx[i]), net.base_mva);
        };
        return solver->solve(inject, last_v, net_tol);
    }

    struct StageEval {
        Eigen::VectorXcd v;
        std::vector<DcCoupling> coupling;
        std::vector<VscFlags> flags;
        double eq1_residual = 0.0;
    };

    /// Network solution plus device derivatives at the given state.
    StageEval derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& dxdt) {
        DeviceStates ds = unpack(x);
        NetworkSolution ns = solve_net(ds);
        DeviceStates dd = ds; // reuse layout for derivative packing

        for (size_t i = 0; i < machines.size(); ++i)
            dd.machines[i] =
                machines[i].derivatives(ds.machines[i], ns.v(machine_bus_idx[i]), omega_s);

        StageEval ev;
        ev.flags.resize(vscs.size());
        ev.coupling.resize(vscs.size());
        // Achieved network current-balance residual (the converter AC/DC
        // balance below holds by construction and only guards regressions).
        ev.eq1_residual = ns.residual;
        Eigen::VectorXd i_inj = Eigen::VectorXd::Zero(dcgrid.bus_ids.size());
        for (size_t i = 0; i < vscs.size(); ++i) {
            const double u_s = std::abs(ns.v(vsc_bus_idx[i]));
            const double u_dc = ds.dc.u(vsc_dc_idx[i]);
            const double p_ref = i == 0 ? acle_p_ref : vscs[i].p_set;
            VscReferences refs = outer_control(vscs[i], p_ref, u_s, u_dc, ds.vscs[i], ev.flags[i]);
            refs = enforce_limits(vscs[i], refs, ev.flags[i]);
            const VscDerivatives vd = vsc_dynamics(vscs[i], ds.vscs[i], refs, u_dc);
            dd.vscs[i].i_d = vd.di_d;
            dd.vscs[i].i_q = vd.di_q;
            dd.vscs[i].xi_dc = vd.dxi_dc;
            ev.coupling[i] = dc_coupling(vscs[i], ds.vscs[i], u_s, u_dc, dcgrid.p_base_mw);
            ev.eq1_residual = std::max(ev.eq1_residual,
                                       std::abs(ev.coupling[i].p_c + ev.coupling[i].p_loss +
                                                ev.coupling[i].p_dc));
            ev.flags[i].u_dc_out_of_band = std::abs(u_dc - 1.0) > vscs[i].limits.u_dc_band;
            ev.flags[i].modulation_exceeded =
                !modulation_within_limit(vscs[i], ds.vscs[i], u_s, u_dc, dcgrid.u_base_kv);
            i_inj(vsc_dc_idx[i]) += ev.coupling[i].i_dc;
        }
        const DcGridDerivatives gd = dc_grid_derivatives(dcgrid, ds.dc, i_inj);
        dd.dc.u = gd.du;
        dd.dc.i_line = gd.di;

        pack(dd, dxdt);
        ev.v = std::move(ns.v);
        last_v = ev.v;
        return ev;
    }
};

Simulator::Simulator(Scenario scenario, SimOverrides overrides)
    : scenario_(std::move(scenario)), overrides_(overrides) {
    impl_ = std::make_shared<Impl>();
    Impl& im = *impl_;
    im.sc = &scenario_;
    im.overrides = overrides_;
    im.net = scenario_.network;
    im.dcgrid = scenario_.dc;
    im.acle = scenario_.acle;
    im.net_tol = scenario_.solver.network_tol;
    im.omega_s = 2.0 * std::numbers::pi * scenario_.network.freq_hz;

    // Operating point: ACLE fixed point (K = 0 collapses to constant P).
    const double k_eff = scenario_.acle.mode == AcleMode::AcLineEmulation ? scenario_.acle.k : 0.0;
    op_ = std::make_shared<AcleOperatingPoint>(
        acle_operating_point(im.net, scenario_.dispatch(), scenario_.hvdc_spec(im.acle.p_cons),
                             k_eff, im.acle.p_cons));
    const PowerFlowSolution& pf = op_->pf;

    im.frozen = freeze_loads(im.net, pf.ac);

    // Machines from the solved operating point (bus-wise: net injection plus
    // the local load draw equals the generation).
    for (const auto& g : scenario_.generators) {
        const int idx = im.net.index_of(g.machine.params.bus);
        double p_load = 0.0, q_load = 0.0;
        for (const auto& ld : im.net.loads)
            if (ld.bus == g.machine.params.bus) {
                p_load += ld.p0_mw;
                q_load += ld.q0_mvar;
            }
        const double ratio = g.machine.params.rated_mva / im.net.base_mva;
        const Complex s_sys((pf.ac.p_inj_mw(idx) + p_load) / im.net.base_mva,
                            (pf.ac.q_inj_mvar(idx) + q_load) / im.net.base_mva);
        Machine m;
        m.params = g.machine.params;
        m.controls = g.machine.controls;
        const MachineState st = m.initialize(pf.ac.voltage(idx), s_sys / ratio);
        im.machines.push_back(m);
        im.machine_bus_idx.push_back(idx);
        im.machine_ratio.push_back(ratio);
        im.x0.conservativeResize(im.x0.size() + MachineState::size);
        st.to_array(im.x0.data() + im.x0.size() - MachineState::size);
    }

    // Converters.
    for (size_t i = 0; i < scenario_.vscs.size(); ++i) {
        const auto& vp = scenario_.vscs[i];
        const auto& cop = pf.converters.at(i);
        VscState vs;
        vs.i_d = cop.p_s / cop.u_s;
        vs.i_q = -cop.q_s / cop.u_s;
        vs.held_id_ff = vs.i_d;
        vs.held_iq_ff = vs.i_q;
        vs.xi_dc = vp.d_mode == ConverterControl::DcVoltage
                       ? vs.i_d - vp.kp_udc * (cop.u_dc - vp.u_dc_set)
                       : 0.0;
        im.vscs.push_back(vp);
        im.vsc_bus_idx.push_back(im.net.index_of(vp.ac_bus));
        im.vsc_dc_idx.push_back(im.dcgrid.index_of(vp.dc_bus));
        im.vsc_persistent.push_back(vs);
        const int n = static_cast<int>(im.x0.size());
        im.x0.conservativeResize(n + VscState::size);
        im.x0(n) = vs.i_d;
        im.x0(n + 1) = vs.i_q;
        im.x0(n + 2) = vs.xi_dc;
    }

    // DC grid state.
    {
        const int nb = static_cast<int>(im.dcgrid.bus_ids.size());
        const int nl = static_cast<int>(im.dcgrid.lines.size());
        const int n = static_cast<int>(im.x0.size());
        im.x0.conservativeResize(n + nb + nl);
        for (int b = 0; b < nb; ++b)
            im.x0(n + b) = pf.dc.u(b);
        for (int l = 0; l < nl; ++l)
            im.x0(n + nb + l) = pf.dc.i_line(l);
    }

    im.acle_state = init_acle(*op_, im.acle);
    im.acle_p_ref = acle_reference(im.acle_state, im.acle);

    im.rebuild_solver();
    // Warm start from the power-flow voltages.
    im.last_v.resize(im.net.n_buses());
    for (int b = 0; b < im.net.n_buses(); ++b)
        im.last_v(b) = pf.ac.voltage(b);
}

double Simulator::initial_residual() {
    Eigen::VectorXd dx(impl_->n_states());
    impl_->derivatives(impl_->x0, dx);
    return dx.cwiseAbs().maxCoeff();
}

SimulationTrace Simulator::run() {
    Impl& im = *impl_;
    const auto& sv = scenario_.solver;
    const double dt = sv.dt;
    const int n_steps = static_cast<int>(std::llround(sv.t_end / dt));
    const int nx = im.n_states();

    SimulationTrace tr;
    // Channel layout.
    for (const auto& m : im.machines) {
        tr.channels.push_back("delta_" + m.params.name);
        tr.channels.push_back("omega_" + m.params.name);
        tr.channels.push_back("pm_" + m.params.name);
        tr.channels.push_back("efd_" + m.params.name);
    }
    tr.channels.push_back("max_angle_sep");
    tr.channels.push_back("max_state_dev");
    for (const auto& b : im.net.buses) {
        tr.channels.push_back("v_" + std::to_string(b.id));
        tr.channels.push_back("th_" + std::to_string(b.id));
    }
    for (const auto& br : scenario_.network.branches)
        tr.channels.push_back("p_" + br.circuit_id + "_mw");
    tr.channels.push_back("acle_dd");
    tr.channels.push_back("acle_y");
    tr.channels.push_back("acle_pref");
    tr.channels.push_back("p_hvdc_mw");
    for (const auto& v : im.vscs) {
        tr.channels.push_back("ps_" + v.name + "_mw");
        tr.channels.push_back("qs_" + v.name + "_mvar");
        tr.channels.push_back("id_" + v.name);
        tr.channels.push_back("iq_" + v.name);
        tr.channels.push_back("ilim_" + v.name);
        tr.channels.push_back("lv_" + v.name);
        tr.channels.push_back("mod_" + v.name);
    }
    for (int b : im.dcgrid.bus_ids)
        tr.channels.push_back("udc_" + std::to_string(b));
    for (size_t l = 0; l < im.dcgrid.lines.size(); ++l)
        tr.channels.push_back("idc_" + std::to_string(l + 1));
    tr.channels.push_back("eq1_residual");

    Eigen::VectorXd x = im.x0;
    const Eigen::VectorXd x_init = im.x0;
    im.next_event = 0;

    auto record = [&](double t, const Impl::StageEval& ev, const Eigen::VectorXd& xs) {
        std::vector<double> row;
        row.reserve(tr.channels.size());
        const DeviceStates ds = im.unpack(xs);
        double max_sep = 0.0;
        for (size_t i = 0; i < ds.machines.size(); ++i)
            for (size_t j = i + 1; j < ds.machines.size(); ++j)
                max_sep = std::max(max_sep,
                                   std::abs(ds.machines[i].delta - ds.machines[j].delta));
        for (const auto& ms : ds.machines) {
            row.push_back(ms.delta);
            row.push_back(ms.omega);
            row.push_back(ms.pm);
            row.push_back(ms.efd);
        }
        row.push_back(max_sep);
        row.push_back((xs - x_init).cwiseAbs().maxCoeff());
        for (int b = 0; b < im.net.n_buses(); ++b) {
            row.push_back(std::abs(ev.v(b)));
            row.push_back(std::arg(ev.v(b)));
        }
        for (const auto& br : scenario_.network.branches) {
            // From-end active power of the branch in the *current* topology.
            double p = 0.0;
            for (const auto& cur : im.net.branches)
                if (cur.circuit_id == br.circuit_id && cur.in_service) {
                    const int f = im.net.index_of(cur.from);
                    const int t2 = im.net.index_of(cur.to);
                    const Complex ys = 1.0 / Complex(cur.r, cur.x);
                    const Complex ysh(0.0, cur.b_shunt / 2.0);
                    const double a = cur.tap;
                    const Complex iff = (ys / (a * a) + ysh) * ev.v(f) - (ys / a) * ev.v(t2);
                    p = (ev.v(f) * std::conj(iff)).real() * im.net.base_mva;
                }
            row.push_back(p);
        }
        row.push_back(im.acle_state.acc[0] - im.acle_state.acc[1]);
        row.push_back(im.acle_state.y);
        row.push_back(im.acle_p_ref);
        row.push_back(ev.coupling.empty() ? 0.0 : -ev.coupling[0].p_s * im.vscs[0].s_rated_mva);
        for (size_t i = 0; i < im.vscs.size(); ++i) {
            row.push_back(ev.coupling[i].p_s * im.vscs[i].s_rated_mva);
            row.push_back(ev.coupling[i].q_s * im.vscs[i].s_rated_mva);
            row.push_back(ds.vscs[i].i_d);
            row.push_back(ds.vscs[i].i_q);
            row.push_back(ev.flags[i].current_limited ? 1.0 : 0.0);
            row.push_back(ev.flags[i].lv_hold ? 1.0 : 0.0);
            row.push_back(ev.flags[i].modulation_exceeded ? 1.0 : 0.0);
        }
        for (int b = 0; b < static_cast<int>(im.dcgrid.bus_ids.size()); ++b)
            row.push_back(ds.dc.u(b));
        for (int l = 0; l < static_cast<int>(im.dcgrid.lines.size()); ++l)
            row.push_back(ds.dc.i_line(l));
        row.push_back(ev.eq1_residual);
        tr.max_eq1_residual = std::max(tr.max_eq1_residual, ev.eq1_residual);
        tr.time.push_back(t);
        tr.rows.push_back(std::move(row));
    };

    Eigen::VectorXd k1(nx), k2(nx), k3(nx), k4(nx), dxs(nx);
    double t = 0.0;
    tr.termination = Termination::Completed;

    try {
        // Initial record.
        Impl::StageEval ev0 = im.derivatives(x, dxs);
        record(0.0, ev0, x);

        for (int step = 0; step < n_steps; ++step) {
            t = step * dt;
            // Due events are applied at the step boundary.
            while (im.next_event < scenario_.events.size() &&
                   scenario_.events[im.next_event].time <= t + dt * 0.5) {
                const auto& e = scenario_.events[im.next_event];
                switch (e.kind) {
                case ScheduledEvent::Kind::Trip:
                    im.net = apply_topology_event(im.net, {EventKind::Trip, e.circuit_id, 0.0});
                    im.rebuild_solver();
                    break;
                case ScheduledEvent::Kind::FaultOn:
                    im.net = apply_topology_event(
                        im.net, {EventKind::FaultOn, e.circuit_id, e.fault_admittance});
                    im.rebuild_solver();
                    break;
                case ScheduledEvent::Kind::FaultClear:
                    im.net =
                        apply_topology_event(im.net, {EventKind::FaultClear, e.circuit_id, 0.0});
                    im.rebuild_solver();
                    break;
                case ScheduledEvent::Kind::Setpoint: {
                    if (e.target == "acle.p_cons_mw") {
                        const double p_new = e.value / im.vscs.at(0).s_rated_mva;
                        im.acle_state.p_s1_ini += p_new - im.acle.p_cons;
                        im.acle.p_cons = p_new;
                    } else {
                        throw DataError("unknown setpoint target '" + e.target + "'");
                    }
                    break;
                }
                }
                ++im.next_event;
            }

            Impl::StageEval ev;
            if (sv.integrator == Integrator::Rk4Partitioned) {
                im.derivatives(x, k1);
                im.derivatives(x + 0.5 * dt * k1, k2);
                im.derivatives(x + 0.5 * dt * k2, k3);
                im.derivatives(x + dt * k3, k4);
                x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            } else {
                im.derivatives(x, k1);
                Eigen::VectorXd xn = x + dt * k1;
                for (int it = 0; it < 4; ++it) {
                    im.derivatives(xn, k2);
                    xn = x + 0.5 * dt * (k1 + k2);
                }
                x = xn;
            }
            // Accepted-state solution: trace, controller sampling, hold update.
            ev = im.derivatives(x, dxs);
            {
                DeviceStates ds = im.unpack(x);
                const double dd = measure_angle_difference(ev.v(im.vsc_bus_idx.at(0)),
                                                           ev.v(im.vsc_bus_idx.at(1)),
                                                           im.acle_state);
                im.acle_p_ref = acle_update(im.acle_state, dd, im.acle, dt);
                // Refresh the feedforward hold registers with accepted values.
                for (size_t i = 0; i < im.vscs.size(); ++i) {
                    VscFlags fl;
                    const double u_s = std::abs(ev.v(im.vsc_bus_idx[i]));
                    const double u_dc = ds.dc.u(im.vsc_dc_idx[i]);
                    const double p_ref = i == 0 ? im.acle_p_ref : im.vscs[i].p_set;
                    outer_control(im.vscs[i], p_ref, u_s, u_dc, ds.vscs[i], fl);
                    im.vsc_persistent[i].held_id_ff = ds.vscs[i].held_id_ff;
                    im.vsc_persistent[i].held_iq_ff = ds.vscs[i].held_iq_ff;
                }
            }
            record(t + dt, ev, x);

            const double sep = tr.rows.back()[static_cast<size_t>(tr.column("max_angle_sep"))];
            if (sep > overrides_.loss_of_sync_threshold) {
                tr.termination = Termination::LossOfSynchronism;
                tr.termination_time = t + dt;
                tr.termination_detail = "max pairwise machine angle separation exceeded";
                return tr;
            }
        }
        tr.termination_time = n_steps * dt;
    } catch (const DcCollapseError& e) {
        tr.termination = Termination::DcCollapse;
        tr.termination_time = t;
        tr.termination_detail = e.what();
    } catch (const SolverError& e) {
        tr.termination = Termination::SolverFailure;
        tr.termination_time = t;
        tr.termination_detail = e.what();
    }
    return tr;
}

SimulationTrace run_simulation(const Scenario& scenario) { return Simulator(scenario).run(); }

StepConvergence step_convergence_check(const Scenario& scenario, double dt, double dt_half) {
    Scenario a = scenario, b = scenario;
    a.solver.dt = dt;
    b.solver.dt = dt_half;
    const SimulationTrace ta = Simulator(a).run();
    const SimulationTrace tb = Simulator(b).run();
    StepConvergence out;
    if (ta.termination != tb.termination)
        return out; // incomparable
    out.comparable = true;
    const int stride = static_cast<int>(std::llround(dt / dt_half));
    std::vector<int> cols;
    for (size_t i = 0; i < ta.channels.size(); ++i)
        if (ta.channels[i].rfind("delta_", 0) == 0)
            cols.push_back(static_cast<int>(i));
    const size_t n = std::min(ta.steps(), tb.steps() / static_cast<size_t>(stride) + 1);
    for (size_t k = 0; k < n; ++k) {
        const size_t kb = k * static_cast<size_t>(stride);
        if (kb >= tb.steps())
            break;
        for (int c : cols)
            out.max_angle_deviation_rad =
                std::max(out.max_angle_deviation_rad,
                         std::abs(ta.rows[k][static_cast<size_t>(c)] -
                                  tb.rows[kb][static_cast<size_t>(c)]));
    }
    return out;
}

} // namespace aclesim
