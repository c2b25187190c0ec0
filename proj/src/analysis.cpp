#include "aclesim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace aclesim {

LosDetection detect_loss_of_synchronism(const SimulationTrace& trace, double threshold) {
    LosDetection out;
    const int col = trace.column("max_angle_sep");
    for (size_t k = 0; k < trace.steps(); ++k)
        if (trace.rows[k][static_cast<size_t>(col)] > threshold) {
            out.tripped = true;
            out.time = trace.time[k];
            return out;
        }
    return out;
}

namespace {

std::string fmt_ms(double s) {
    std::ostringstream os;
    os << std::llround(s * 1e3) << " ms";
    return os.str();
}

} // namespace

CctResult compute_cct(const StabilityProbe& probe, const CctOptions& opt) {
    const double res = opt.resolution_s;
    const long long cap_n = std::llround(opt.bracket_max_s / res);

    CctResult r;
    auto run = [&](long long n) {
        const bool stable = probe(n * res);
        ++r.runs;
        r.run_log.push_back(fmt_ms(n * res) + (stable ? ": stable" : ": unstable"));
        return stable;
    };

    if (!run(0))
        throw SolverError("scenario is unstable even with a zero-duration fault");

    long long lo = 0;
    long long hi = -1;
    for (long long n = std::llround(opt.bracket_start_s / res);; n *= 2) {
        if (n >= cap_n)
            n = cap_n;
        if (run(n)) {
            lo = n;
            if (n == cap_n) {
                r.beyond_cap = true;
                r.cct_s = cap_n * res;
                r.bracket_lo_s = cap_n * res;
                r.bracket_hi_s = cap_n * res;
                return r;
            }
        } else {
            hi = n;
            break;
        }
    }

    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (run(mid))
            lo = mid;
        else
            hi = mid;
    }

    // Confirming re-runs of the final bracket.
    if (!run(lo) || run(hi))
        throw SolverError("CCT bisection bracket failed re-confirmation");

    r.cct_s = lo * res;
    r.bracket_lo_s = lo * res;
    r.bracket_hi_s = hi * res;
    return r;
}

Scenario with_clearing_duration(const Scenario& base, const std::string& circuit_id,
                                double duration_s) {
    Scenario sc = base;
    double t_on = -1.0;
    for (const auto& e : sc.events)
        if (e.kind == ScheduledEvent::Kind::FaultOn && e.circuit_id == circuit_id)
            t_on = e.time;
    if (t_on < 0.0)
        throw DataError("no FaultOn event for circuit '" + circuit_id + "'");
    bool found = false;
    for (auto& e : sc.events)
        if (e.kind == ScheduledEvent::Kind::FaultClear && e.circuit_id == circuit_id) {
            e.time = t_on + duration_s;
            found = true;
        }
    if (!found)
        throw DataError("no FaultClear event for circuit '" + circuit_id + "'");
    std::stable_sort(sc.events.begin(), sc.events.end(),
                     [](const ScheduledEvent& a, const ScheduledEvent& b) {
                         return a.time < b.time;
                     });
    return sc;
}

bool run_is_stable(const Scenario& sc, std::string* termination_name) {
    const SimulationTrace tr = Simulator(sc).run();
    if (termination_name) {
        switch (tr.termination) {
        case Termination::Completed:
            *termination_name = "completed";
            break;
        case Termination::LossOfSynchronism:
            *termination_name = "loss_of_synchronism";
            break;
        case Termination::DcCollapse:
            *termination_name = "dc_collapse";
            break;
        case Termination::SolverFailure:
            *termination_name = "solver_failure";
            break;
        }
    }
    if (tr.termination == Termination::SolverFailure)
        throw SolverError("simulation failed during CCT probe: " + tr.termination_detail);
    return tr.termination == Termination::Completed;
}

CctResult compute_cct(const Scenario& base, const std::string& faulted_circuit,
                      const CctOptions& opt) {
    std::vector<std::string> reasons;
    auto probe = [&](double duration) {
        std::string name;
        const bool ok = run_is_stable(with_clearing_duration(base, faulted_circuit, duration),
                                      &name);
        reasons.push_back(name);
        return ok;
    };
    CctResult r = compute_cct(probe, opt);
    for (size_t i = 0; i < r.run_log.size() && i < reasons.size(); ++i)
        r.run_log[i] += " (" + reasons[i] + ")";
    return r;
}

Scenario acle_case(const Scenario& base, double k, double t_filter) {
    Scenario sc = base;
    sc.acle.mode = AcleMode::AcLineEmulation;
    sc.acle.k = k;
    sc.acle.t_filter = t_filter;
    return sc;
}

Scenario constant_p_case(const Scenario& base, double k) {
    // Same initial link flow as the ACLE case with this K: take the ACLE
    // operating point's converter-1 power as the constant setpoint.
    Scenario acle = acle_case(base, k, base.acle.t_filter);
    const AcleOperatingPoint op =
        acle_operating_point(acle.network, acle.dispatch(), acle.hvdc_spec(acle.acle.p_cons), k,
                             acle.acle.p_cons);
    Scenario sc = base;
    sc.acle.mode = AcleMode::ConstantP;
    sc.acle.k = 0.0;
    sc.acle.p_cons = op.p_s1_ini;
    return sc;
}

AcleOperatingPoint post_trip_equilibrium(const Scenario& base, const std::string& circuit_id) {
    const double k_eff = base.acle.mode == AcleMode::AcLineEmulation ? base.acle.k : 0.0;
    const AcleOperatingPoint pre = acle_operating_point(
        base.network, base.dispatch(), base.hvdc_spec(base.acle.p_cons), k_eff, base.acle.p_cons);

    const std::vector<FrozenLoad> frozen = freeze_loads(base.network, pre.pf.ac);
    const NetworkModel tripped =
        apply_topology_event(base.network, {EventKind::Trip, circuit_id, 0.0});

    // Pre-trip machine equilibria fix the exciter references.
    std::vector<Machine> machines;
    std::vector<double> efd_pre;
    for (const auto& g : base.generators) {
        Machine m = g.machine;
        const int b = m.params.bus - 1;
        const Complex v = pre.pf.ac.voltage(b);
        const Complex s(pre.pf.ac.p_inj_mw(b) / m.params.rated_mva,
                        pre.pf.ac.q_inj_mvar(b) / m.params.rated_mva);
        efd_pre.push_back(m.initialize(v, s).efd);
        machines.push_back(std::move(m));
    }

    AcPowerFlowOptions opt;
    opt.distributed_slack = true;
    opt.frozen_loads = &frozen;

    // Governor references hold the pre-trip solved outputs (the slack unit
    // keeps its share of pre-trip losses); distributed slack then covers only
    // the post-trip loss change.
    std::vector<GeneratorDispatch> gens = base.dispatch(true);
    for (auto& gd : gens)
        gd.p_mw = pre.pf.ac.p_inj_mw(gd.bus - 1);
    AcleOperatingPoint op = pre;
    for (int pass = 0; pass < 4; ++pass) {
        op = acle_operating_point(tripped, gens, base.hvdc_spec(base.acle.p_cons), k_eff,
                                  base.acle.p_cons, opt);
        // Static-exciter droop: the held terminal voltage shifts with the
        // new field-voltage demand, v = v_ref - efd/Ka.
        double shift = 0.0;
        for (size_t i = 0; i < machines.size(); ++i) {
            Machine m = machines[i];
            const int b = m.params.bus - 1;
            const Complex v = op.pf.ac.voltage(b);
            const Complex s(op.pf.ac.p_inj_mw(b) / m.params.rated_mva,
                            op.pf.ac.q_inj_mvar(b) / m.params.rated_mva);
            const double efd = m.initialize(v, s).efd;
            const double v_new = base.network.bus(m.params.bus).v_set +
                                 (efd_pre[i] - efd) / m.controls.exciter.ka;
            shift = std::max(shift, std::abs(v_new - gens[i].v_set));
            gens[i].v_set = v_new;
        }
        if (shift < 1e-7)
            break;
    }
    return op;
}

CctSweepResult sweep_cct(const Scenario& base, const std::string& faulted_circuit,
                         const std::vector<double>& k_list, const std::vector<double>& t_grid,
                         const CctOptions& opt, int jobs) {
    if (k_list.empty() || t_grid.empty())
        throw DataError("sweep grids must be non-empty");
    CctSweepResult out;
    out.k_list = k_list;
    out.t_grid = t_grid;
    out.baselines.resize(k_list.size());
    out.cells.resize(k_list.size() * t_grid.size());

    struct Task {
        SweepCell* cell;
        Scenario scenario;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < k_list.size(); ++i) {
        SweepCell& b = out.baselines[i];
        b.case_name = "constant_p";
        b.k = k_list[i];
        try {
            tasks.push_back({&b, constant_p_case(base, k_list[i])});
        } catch (const std::exception& e) {
            b.failed = true;
            b.error = e.what();
        }
        for (size_t j = 0; j < t_grid.size(); ++j) {
            SweepCell& c = out.cells[i * t_grid.size() + j];
            c.case_name = "acle";
            c.k = k_list[i];
            c.t_filter = t_grid[j];
            tasks.push_back({&c, acle_case(base, k_list[i], t_grid[j])});
        }
    }

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= tasks.size())
                return;
            Task& t = tasks[idx];
            try {
                t.cell->cct = compute_cct(t.scenario, faulted_circuit, opt);
            } catch (const std::exception& e) {
                t.cell->failed = true;
                t.cell->error = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return out;
}

namespace {

void write_cell_row(std::ostream& os, const SweepCell& c, bool with_t) {
    os << c.case_name << "," << c.k << ",";
    if (with_t)
        os << c.t_filter;
    os << ",";
    if (c.failed) {
        os << ",,," << "error:" << c.error << "\n";
        return;
    }
    os << std::llround(c.cct.cct_s * 1e3) << "," << std::llround(c.cct.bracket_lo_s * 1e3) << ","
       << std::llround(c.cct.bracket_hi_s * 1e3) << ","
       << (c.cct.beyond_cap ? "cct_gt_cap" : "ok") << "\n";
}

} // namespace

void write_sweep_csv(const CctSweepResult& sweep, std::ostream& os) {
    os << "case,K_pu_per_rad,T_s,cct_ms,bracket_lo_ms,bracket_hi_ms,status\n";
    for (size_t i = 0; i < sweep.k_list.size(); ++i) {
        write_cell_row(os, sweep.baselines[i], false);
        for (size_t j = 0; j < sweep.t_grid.size(); ++j)
            write_cell_row(os, sweep.cells[i * sweep.t_grid.size() + j], true);
    }
}

void write_case_series(const CctSweepResult& sweep, size_t k_index, std::ostream& os) {
    os << "T_s,cct_ms\n";
    for (size_t j = 0; j < sweep.t_grid.size(); ++j) {
        const SweepCell& c = sweep.cells[k_index * sweep.t_grid.size() + j];
        if (c.failed)
            continue;
        os << sweep.t_grid[j] << "," << std::llround(c.cct.cct_s * 1e3) << "\n";
    }
}

} // namespace aclesim
