#include <doctest.h>

#include "aclesim/netsolve.hpp"
#include "aclesim/machine.hpp"
#include "aclesim/powerflow.hpp"
#include "aclesim/vsc.hpp"
#include "helpers.hpp"

using namespace aclesim;

namespace {

NetworkModel two_bus() {
    NetworkModel net;
    net.buses = {{1, BusKind::Slack, 220.0, 1.0, 0.0, 0.0}, {2, BusKind::PQ, 220.0, 1.0, 0.0, 0.0}};
    Branch br;
    br.from = 1;
    br.to = 2;
    br.x = 0.1;
    br.circuit_id = "1-2";
    net.branches = {br};
    return net;
}

} // namespace

TEST_CASE("no sources give the zero solution") {
    // A device shunt keeps the augmented matrix regular; with no current
    // injected anywhere the network de-energizes completely.
    NetworkSolver solver(build_ybus(two_bus()), {{0, Complex(0.0, -5.0)}}, {});
    Eigen::VectorXcd guess = Eigen::VectorXcd::Ones(2);
    auto sol = solver.solve([](const Eigen::VectorXcd&, Eigen::VectorXcd&) {}, guess);
    CHECK(sol.v.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sol.residual < 1e-12);
}

TEST_CASE("open-circuit bus floats to the source voltage") {
    // Norton source with its own shunt at bus 1; nothing draws current at
    // bus 2, so no current flows over the branch and V1 = V2.
    const Complex y_src(0.0, -5.0);
    const Complex i_src(1.0, 0.2);
    NetworkSolver solver(build_ybus(two_bus()), {{0, y_src}}, {});
    Eigen::VectorXcd guess = Eigen::VectorXcd::Ones(2);
    auto sol = solver.solve(
        [&](const Eigen::VectorXcd&, Eigen::VectorXcd& i) { i(0) += i_src; }, guess);
    CHECK(std::abs(sol.v(0) - sol.v(1)) < 1e-12);
    CHECK(std::abs(sol.v(0) - i_src / y_src) < 1e-12);
}

TEST_CASE("solver reproduces the power-flow voltages on the bundled system") {
    const Scenario sc = testutil::bundled_scenario();
    const AcleOperatingPoint op = acle_operating_point(
        sc.network, sc.dispatch(), sc.hvdc_spec(sc.acle.p_cons), sc.acle.k, sc.acle.p_cons);
    const AcSolution& pf = op.pf.ac;
    const int n = sc.network.n_buses();

    // Same interface the dynamic solver uses: machines as Norton
    // equivalents, loads frozen, converters as fixed current injections.
    const std::vector<FrozenLoad> frozen = freeze_loads(sc.network, pf);
    std::vector<Machine> machines;
    std::vector<MachineState> states;
    std::vector<int> mbus;
    std::vector<double> ratio;
    std::vector<std::pair<int, Complex>> shunts;
    for (const auto& g : sc.generators) {
        const int idx = sc.network.index_of(g.machine.params.bus);
        const double r = g.machine.params.rated_mva / sc.network.base_mva;
        const Complex s_sys(pf.p_inj_mw(idx) / sc.network.base_mva,
                            pf.q_inj_mvar(idx) / sc.network.base_mva);
        Machine m;
        m.params = g.machine.params;
        m.controls = g.machine.controls;
        states.push_back(m.initialize(pf.voltage(idx), s_sys / r));
        machines.push_back(m);
        mbus.push_back(idx);
        ratio.push_back(r);
        shunts.emplace_back(idx, m.norton_admittance() * r);
    }
    Eigen::VectorXcd i_conv = Eigen::VectorXcd::Zero(n);
    for (size_t i = 0; i < sc.vscs.size(); ++i) {
        const int idx = sc.network.index_of(sc.vscs[i].ac_bus);
        const auto& cop = op.pf.converters.at(i);
        const double r = sc.vscs[i].s_rated_mva / sc.network.base_mva;
        i_conv(idx) += std::conj(Complex(cop.p_s, cop.q_s) * r / pf.voltage(idx));
    }

    NetworkSolver solver(build_ybus(sc.network), shunts, frozen);
    Eigen::VectorXcd guess = Eigen::VectorXcd::Ones(n);
    auto sol = solver.solve(
        [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& i) {
            i += i_conv;
            for (size_t k = 0; k < machines.size(); ++k)
                i(mbus[k]) += machines[k].norton_source(states[k], v(mbus[k])) * ratio[k];
        },
        guess);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(sol.v(k) - pf.voltage(k)) < 1e-6);
}
