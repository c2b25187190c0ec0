#include "aclesim/network.hpp"

#include <algorithm>
#include <cmath>

namespace aclesim {

int NetworkModel::index_of(int bus_id) const {
    for (int i = 0; i < n_buses(); ++i)
        if (buses[i].id == bus_id)
            return i;
    throw DataError("unknown bus id " + std::to_string(bus_id));
}

const Bus& NetworkModel::bus(int bus_id) const { return buses[index_of(bus_id)]; }

const Branch& NetworkModel::branch(const std::string& circuit_id) const {
    for (const auto& br : branches)
        if (br.circuit_id == circuit_id)
            return br;
    throw DataError("unknown circuit id '" + circuit_id + "'");
}

bool NetworkModel::has_branch(const std::string& circuit_id) const {
    return std::any_of(branches.begin(), branches.end(),
                       [&](const Branch& br) { return br.circuit_id == circuit_id; });
}

AdmittanceMatrix build_ybus(const NetworkModel& net) {
    const int n = net.n_buses();
    AdmittanceMatrix ym;
    ym.y = Eigen::MatrixXcd::Zero(n, n);

    for (const auto& br : net.branches) {
        if (!br.in_service)
            continue;
        if (br.from == br.to)
            throw DataError("branch '" + br.circuit_id + "' connects a bus to itself");
        if (br.x == 0.0 && br.r == 0.0)
            throw DataError("branch '" + br.circuit_id + "' has zero impedance");
        if (br.tap <= 0.0)
            throw DataError("branch '" + br.circuit_id + "' has non-positive tap");
        const int f = net.index_of(br.from);
        const int t = net.index_of(br.to);
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex ysh(0.0, br.b_shunt / 2.0);
        const double a = br.tap;
        ym.y(f, f) += ys / (a * a) + ysh;
        ym.y(t, t) += ys + ysh;
        ym.y(f, t) -= ys / a;
        ym.y(t, f) -= ys / a;
    }

    for (int i = 0; i < n; ++i)
        ym.y(i, i) += Complex(net.buses[i].shunt_g, net.buses[i].shunt_b);

    for (const auto& fs : net.fault_shunts)
        ym.y(net.index_of(fs.bus), net.index_of(fs.bus)) += Complex(fs.g, 0.0);

    // An energized bus with no connection at all cannot be solved.
    for (int i = 0; i < n; ++i) {
        bool connected = false;
        for (int j = 0; j < n && !connected; ++j)
            if (j != i && std::abs(ym.y(i, j)) > 0.0)
                connected = true;
        if (!connected)
            throw TopologyError("bus " + std::to_string(net.buses[i].id) +
                                " is isolated from the network");
    }
    return ym;
}

NetworkModel apply_topology_event(const NetworkModel& net, const TopologyEvent& ev) {
    NetworkModel out = net;
    auto find_branch = [&out](const std::string& id) -> Branch& {
        for (auto& br : out.branches)
            if (br.circuit_id == id)
                return br;
        throw DataError("unknown circuit id '" + id + "'");
    };

    switch (ev.kind) {
    case EventKind::Trip: {
        Branch& br = find_branch(ev.circuit_id);
        if (!br.in_service)
            throw TopologyError("circuit '" + ev.circuit_id + "' already out of service");
        br.in_service = false;
        break;
    }
    case EventKind::FaultOn: {
        Branch& br = find_branch(ev.circuit_id);
        if (!br.in_service)
            throw TopologyError("cannot fault out-of-service circuit '" + ev.circuit_id + "'");
        for (const auto& fs : out.fault_shunts)
            if (fs.circuit_id == ev.circuit_id)
                throw TopologyError("circuit '" + ev.circuit_id + "' already faulted");
        if (ev.fault_admittance < 1e4)
            throw DataError("fault admittance below 1e4 pu");
        out.fault_shunts.push_back({ev.circuit_id, br.from, ev.fault_admittance});
        break;
    }
    case EventKind::FaultClear: {
        auto it = std::find_if(out.fault_shunts.begin(), out.fault_shunts.end(),
                               [&](const FaultShunt& fs) { return fs.circuit_id == ev.circuit_id; });
        if (it == out.fault_shunts.end())
            throw TopologyError("no active fault on circuit '" + ev.circuit_id + "'");
        out.fault_shunts.erase(it);
        find_branch(ev.circuit_id).in_service = false;
        break;
    }
    }
    return out;
}

} // namespace aclesim
