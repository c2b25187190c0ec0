// Command-line front end: powerflow / simulate / cct / sweep workflows over
// a scenario file. Exit codes: 0 success, 1 input error, 2 solver failure,
// 3 loss of synchronism (simulate).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aclesim/analysis.hpp"
#include "aclesim/manifest.hpp"
#include "aclesim/scenario.hpp"
#include "aclesim/tds.hpp"

using namespace aclesim;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    double dt = 0.0;    // 0: keep scenario value
    double t_end = 0.0; // 0: keep scenario value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario file")->required();
    cmd->add_option("--set", args.overrides, "Override section.key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "Output directory for CSV files and the manifest");
    cmd->add_option("--dt", args.dt, "Integration step override, s");
    cmd->add_option("--t-end", args.t_end, "Simulation horizon override, s");
}

Scenario load(const CommonArgs& args) {
    Scenario sc = load_scenario_file(args.scenario_path, args.overrides);
    if (args.dt > 0.0)
        sc.solver.dt = args.dt;
    if (args.t_end > 0.0)
        sc.solver.t_end = args.t_end;
    return sc;
}

/// Writer helper: every output lands in --out with a shared manifest.
class OutputDir {
  public:
    OutputDir(const CommonArgs& args, std::string command) : dir_(args.out_dir) {
        manifest_.command = std::move(command);
        manifest_.scenario_path = args.scenario_path;
        manifest_.overrides = args.overrides;
        std::ifstream in(args.scenario_path);
        std::stringstream buf;
        buf << in.rdbuf();
        manifest_.scenario_hash = content_hash(buf.str());
        if (!dir_.empty())
            fs::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::ofstream open(const std::string& name) {
        manifest_.outputs.push_back(name);
        return std::ofstream(fs::path(dir_) / name);
    }

    ~OutputDir() {
        if (dir_.empty())
            return;
        std::ofstream os(fs::path(dir_) / "manifest.json");
        write_manifest(manifest_, os);
    }

  private:
    std::string dir_;
    RunManifest manifest_;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stod(tok));
    if (out.empty())
        throw DataError("empty list '" + text + "'");
    return out;
}

/// "a:step:b" inclusive grid, or a plain comma list.
std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos)
        return parse_list(text);
    std::stringstream ss(text);
    std::string a, s, b;
    if (!std::getline(ss, a, ':') || !std::getline(ss, s, ':') || !std::getline(ss, b))
        throw DataError("grid must be start:step:stop, got '" + text + "'");
    const double start = std::stod(a), step = std::stod(s), stop = std::stod(b);
    if (step <= 0.0 || stop < start)
        throw DataError("grid must ascend, got '" + text + "'");
    std::vector<double> out;
    for (long long i = 0;; ++i) {
        const double v = start + step * static_cast<double>(i);
        if (v > stop + 1e-12)
            break;
        out.push_back(v);
    }
    return out;
}

std::string faulted_circuit(const Scenario& sc) {
    for (const auto& ev : sc.events)
        if (ev.kind == ScheduledEvent::Kind::FaultOn)
            return ev.circuit_id;
    throw DataError("scenario schedules no fault event");
}

int cmd_powerflow(const CommonArgs& args) {
    const Scenario sc = load(args);
    const double k_eff = sc.acle.mode == AcleMode::AcLineEmulation ? sc.acle.k : 0.0;
    const AcleOperatingPoint op = acle_operating_point(
        sc.network, sc.dispatch(), sc.hvdc_spec(sc.acle.p_cons), k_eff, sc.acle.p_cons);
    const double s_conv = sc.vscs.front().s_rated_mva;

    std::cout << "operating point (" << op.iterations << " outer iterations)\n";
    std::cout << "  P_HVDC = " << -op.p_s1_ini * s_conv << " MW\n";
    std::cout << "  delta_s1 - delta_s2 = " << op.delta_s1_0 - op.delta_s2_0 << " rad\n";
    std::printf("  %-4s %10s %10s\n", "bus", "v (pu)", "angle (deg)");
    for (int i = 0; i < sc.network.n_buses(); ++i)
        std::printf("  %-4d %10.5f %10.4f\n", sc.network.buses[i].id, op.pf.ac.v_mag(i),
                    op.pf.ac.v_ang(i) * 180.0 / 3.14159265358979324);
    std::printf("  %-8s %12s %12s\n", "circuit", "P_from (MW)", "Q_from (MVAr)");
    for (const auto& f : op.pf.ac.flows)
        std::printf("  %-8s %12.2f %12.2f\n", f.circuit_id.c_str(), f.p_from_mw, f.q_from_mvar);

    OutputDir out(args, "powerflow");
    if (out.enabled()) {
        auto os = out.open("operating_point.csv");
        os << "bus,v_pu,angle_rad,p_inj_mw,q_inj_mvar\n";
        for (int i = 0; i < sc.network.n_buses(); ++i)
            os << sc.network.buses[i].id << "," << op.pf.ac.v_mag(i) << "," << op.pf.ac.v_ang(i)
               << "," << op.pf.ac.p_inj_mw(i) << "," << op.pf.ac.q_inj_mvar(i) << "\n";
        auto fl = out.open("flows.csv");
        fl << "circuit,p_from_mw,q_from_mvar,p_to_mw,q_to_mvar\n";
        for (const auto& f : op.pf.ac.flows)
            fl << f.circuit_id << "," << f.p_from_mw << "," << f.q_from_mvar << "," << f.p_to_mw
               << "," << f.q_to_mvar << "\n";
    }
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const Scenario sc = load(args);
    const SimulationTrace tr = run_simulation(sc);

    std::cout << "simulated " << tr.time.back() << " s, " << tr.steps() << " steps\n";
    std::cout << "termination: ";
    switch (tr.termination) {
    case Termination::Completed:
        std::cout << "completed\n";
        break;
    case Termination::LossOfSynchronism:
        std::cout << "loss of synchronism at t = " << tr.termination_time << " s\n";
        break;
    case Termination::DcCollapse:
        std::cout << "DC collapse at t = " << tr.termination_time << " s\n";
        break;
    case Termination::SolverFailure:
        std::cout << "solver failure: " << tr.termination_detail << "\n";
        break;
    }
    std::cout << "max power-balance residual: " << tr.max_eq1_residual << " pu\n";

    OutputDir out(args, "simulate");
    if (out.enabled()) {
        auto os = out.open("trace.csv");
        tr.write_csv(os, sc.solver.trace_subsample);
    }
    switch (tr.termination) {
    case Termination::Completed:
        return 0;
    case Termination::LossOfSynchronism:
        return 3;
    default:
        return 2;
    }
}

int cmd_cct(const CommonArgs& args, const std::string& fault_flag) {
    const Scenario sc = load(args);
    const std::string circuit = fault_flag.empty() ? faulted_circuit(sc) : fault_flag;
    const CctResult r = compute_cct(sc, circuit);
    std::cout << "CCT for " << circuit << ": " << r.cct_s * 1e3 << " ms (bracket "
              << r.bracket_lo_s * 1e3 << " / " << r.bracket_hi_s * 1e3 << " ms, " << r.runs
              << " probes" << (r.beyond_cap ? ", beyond search cap" : "") << ")\n";
    for (const auto& line : r.run_log)
        std::cout << "  " << line << "\n";

    OutputDir out(args, "cct");
    if (out.enabled()) {
        auto os = out.open("cct.csv");
        os << "circuit,cct_ms,bracket_lo_ms,bracket_hi_ms,beyond_cap,probes\n";
        os << circuit << "," << r.cct_s * 1e3 << "," << r.bracket_lo_s * 1e3 << ","
           << r.bracket_hi_s * 1e3 << "," << (r.beyond_cap ? 1 : 0) << "," << r.runs << "\n";
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& fault_flag, const std::string& k_text,
              const std::string& t_text, int jobs) {
    const Scenario sc = load(args);
    const std::string circuit = fault_flag.empty() ? faulted_circuit(sc) : fault_flag;
    const std::vector<double> k_list = parse_list(k_text);
    const std::vector<double> t_grid = parse_grid(t_text);

    const CctSweepResult sweep = sweep_cct(sc, circuit, k_list, t_grid, {}, jobs);
    write_sweep_csv(sweep, std::cout);

    OutputDir out(args, "sweep");
    if (out.enabled()) {
        auto os = out.open("sweep.csv");
        write_sweep_csv(sweep, os);
        for (size_t i = 0; i < sweep.k_list.size(); ++i) {
            std::ostringstream name;
            name << "series_k" << sweep.k_list[i] << ".csv";
            auto ss = out.open(name.str());
            write_case_series(sweep, i, ss);
        }
    }
    for (const auto& c : sweep.cells)
        if (c.failed)
            return 2;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phasor-domain transient-stability studies of AC systems with an embedded "
                 "VSC-HVDC link"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonArgs pf_args, sim_args, cct_args, sweep_args;
    std::string cct_fault, sweep_fault;
    std::string k_text = "1,2,4", t_text = "0:0.05:2";
    int jobs = 1;

    add_common(app.add_subcommand("powerflow", "Solve the AC/DC operating point"), pf_args);
    add_common(app.add_subcommand("simulate", "Run the time-domain simulation"), sim_args);
    CLI::App* cct = app.add_subcommand("cct", "Critical clearing time of the scheduled fault");
    add_common(cct, cct_args);
    cct->add_option("--fault", cct_fault, "Faulted circuit id (default: from the scenario)");
    CLI::App* sweep = app.add_subcommand("sweep", "CCT over a (K, T) grid plus baselines");
    add_common(sweep, sweep_args);
    sweep->add_option("--fault", sweep_fault, "Faulted circuit id (default: from the scenario)");
    sweep->add_option("--k-list", k_text, "Comma-separated gains, pu/rad converter base");
    sweep->add_option("--t-grid", t_text, "Filter constants: start:step:stop or comma list");
    sweep->add_option("--jobs", jobs, "Parallel sweep workers")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("powerflow"))
            return cmd_powerflow(pf_args);
        if (app.got_subcommand("simulate"))
            return cmd_simulate(sim_args);
        if (app.got_subcommand("cct"))
            return cmd_cct(cct_args, cct_fault);
        return cmd_sweep(sweep_args, sweep_fault, k_text, t_text, jobs);
    } catch (const DataError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
