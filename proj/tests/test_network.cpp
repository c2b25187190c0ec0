#include <doctest.h>

#include <Eigen/Dense>

#include "aclesim/network.hpp"

using namespace aclesim;

namespace {

NetworkModel two_bus(double x) {
    NetworkModel net;
    net.buses = {{1, BusKind::Slack, 220.0, 1.0, 0.0, 0.0}, {2, BusKind::PQ, 220.0, 1.0, 0.0, 0.0}};
    Branch br;
    br.from = 1;
    br.to = 2;
    br.x = x;
    br.circuit_id = "1-2";
    net.branches = {br};
    return net;
}

/// Transmission corridor of the studied system between buses 6 and 10:
/// single end sections and double-circuit middle sections.
NetworkModel corridor() {
    NetworkModel net;
    for (int id : {6, 7, 8, 9, 10})
        net.buses.push_back({id, id == 6 ? BusKind::Slack : BusKind::PQ, 220.0, 1.0, 0.0, 0.0});
    auto line = [&](int f, int t, double x, const std::string& cid) {
        Branch br;
        br.from = f;
        br.to = t;
        br.x = x;
        br.circuit_id = cid;
        net.branches.push_back(br);
    };
    line(6, 7, 0.025, "6-7");
    line(7, 8, 0.11, "7-8a");
    line(7, 8, 0.11, "7-8b");
    line(8, 9, 0.11, "8-9a");
    line(8, 9, 0.11, "8-9b");
    line(9, 10, 0.025, "9-10");
    return net;
}

/// Kron reduction oracle: eliminate every bus except `keep_a`/`keep_b` and
/// return the equivalent transfer reactance.
double kron_transfer_reactance(const NetworkModel& net, int keep_a, int keep_b) {
    const Eigen::MatrixXcd y = build_ybus(net).y;
    const int n = static_cast<int>(y.rows());
    const int ia = net.index_of(keep_a), ib = net.index_of(keep_b);
    std::vector<int> elim;
    for (int i = 0; i < n; ++i)
        if (i != ia && i != ib)
            elim.push_back(i);
    const int m = static_cast<int>(elim.size());
    Eigen::MatrixXcd ykk(2, 2), yke(2, m), yek(m, 2), yee(m, m);
    const int keep[2] = {ia, ib};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c)
            ykk(r, c) = y(keep[r], keep[c]);
        for (int c = 0; c < m; ++c)
            yke(r, c) = y(keep[r], elim[c]);
    }
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < 2; ++c)
            yek(r, c) = y(elim[r], keep[c]);
        for (int c = 0; c < m; ++c)
            yee(r, c) = y(elim[r], elim[c]);
    }
    const Eigen::MatrixXcd yr = ykk - yke * yee.partialPivLu().solve(yek);
    return (1.0 / -yr(0, 1)).imag();
}

} // namespace

TEST_CASE("two-bus Ybus matches the single-line analytic form") {
    const auto y = build_ybus(two_bus(0.1)).y;
    CHECK(std::abs(y(0, 0) - Complex(0.0, -10.0)) < 1e-12);
    CHECK(std::abs(y(0, 1) - Complex(0.0, 10.0)) < 1e-12);
    CHECK(std::abs(y(1, 0) - Complex(0.0, 10.0)) < 1e-12);
    CHECK(std::abs(y(1, 1) - Complex(0.0, -10.0)) < 1e-12);
}

TEST_CASE("corridor reduces to the series/parallel equivalent") {
    // 0.025 + 0.11/2 + 0.11/2 + 0.025; the Kron oracle must agree with plain
    // series/parallel arithmetic for a shunt-free radial corridor.
    CHECK(kron_transfer_reactance(corridor(), 6, 10) == doctest::Approx(0.16).epsilon(1e-12));
}

TEST_CASE("corridor with circuit 7-8a out of service") {
    NetworkModel net = apply_topology_event(corridor(), {EventKind::Trip, "7-8a", 0.0});
    CHECK(kron_transfer_reactance(net, 6, 10) == doctest::Approx(0.215).epsilon(1e-12));
}

TEST_CASE("trip halves the double-circuit admittance") {
    NetworkModel net = apply_topology_event(corridor(), {EventKind::Trip, "7-8a", 0.0});
    const auto y = build_ybus(net).y;
    const int i7 = net.index_of(7), i8 = net.index_of(8);
    CHECK(std::abs(y(i7, i8) - Complex(0.0, 1.0 / 0.11)) < 1e-12);
}

TEST_CASE("fault-on adds the shunt at the from end and clearing removes the circuit") {
    NetworkModel faulted = apply_topology_event(corridor(), {EventKind::FaultOn, "7-8a", 1e5});
    const auto yf = build_ybus(faulted).y;
    const auto y0 = build_ybus(corridor()).y;
    const int i7 = faulted.index_of(7);
    CHECK((yf(i7, i7) - y0(i7, i7)).real() == doctest::Approx(1e5).epsilon(1e-12));

    NetworkModel cleared = apply_topology_event(faulted, {EventKind::FaultClear, "7-8a", 0.0});
    CHECK(cleared.fault_shunts.empty());
    // Clearing disconnects the faulted circuit: Ybus must equal a fresh build
    // of the network with 7-8a removed.
    NetworkModel reference = corridor();
    std::erase_if(reference.branches, [](const Branch& b) { return b.circuit_id == "7-8a"; });
    const auto yc = build_ybus(cleared).y;
    const auto yr = build_ybus(reference).y;
    CHECK((yc - yr).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("invalid topology transitions are rejected") {
    CHECK_THROWS_AS(apply_topology_event(corridor(), {EventKind::Trip, "nope", 0.0}), DataError);
    CHECK_THROWS_AS(apply_topology_event(corridor(), {EventKind::FaultClear, "7-8a", 0.0}),
                    TopologyError);
    NetworkModel tripped = apply_topology_event(corridor(), {EventKind::Trip, "7-8a", 0.0});
    CHECK_THROWS_AS(apply_topology_event(tripped, {EventKind::Trip, "7-8a", 0.0}), TopologyError);
}

TEST_CASE("zero-impedance branch is a data error") {
    NetworkModel net = two_bus(0.1);
    net.branches[0].x = 0.0;
    net.branches[0].r = 0.0;
    CHECK_THROWS_AS(build_ybus(net), DataError);
}
