#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aclesim {

using Complex = std::complex<double>;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BusKind { Slack, PV, PQ };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double base_kv = 0.0;
    double v_set = 1.0;   ///< voltage setpoint (slack/PV) or initial guess
    double shunt_g = 0.0; ///< pu on system base
    double shunt_b = 0.0;
};

struct Branch {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double b_shunt = 0.0; ///< total line charging, pu
    double tap = 1.0;
    bool in_service = true;
    std::string circuit_id;
};

/// Static load. Power-flow treats it as constant PQ; dynamics freeze a
/// constant-current active part and a constant-admittance reactive part
/// at the initial operating point.
struct Load {
    int bus = 0;
    double p0_mw = 0.0;
    double q0_mvar = 0.0;
};

struct FaultSpec {
    std::string circuit_id;
    double fault_admittance = 1e5; ///< pu shunt conductance at the near-from bus
    double t_on = 0.0;
    double t_clear = 0.0;
};

/// Shunt added by an active fault, keyed by the faulted circuit.
struct FaultShunt {
    std::string circuit_id;
    int bus = 0;
    double g = 0.0;
};

class NetworkModel {
  public:
    double base_mva = 100.0;
    double base_kv = 220.0;
    double freq_hz = 50.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Load> loads;
    std::vector<FaultShunt> fault_shunts;

    int index_of(int bus_id) const;
    const Bus& bus(int bus_id) const;
    const Branch& branch(const std::string& circuit_id) const;
    bool has_branch(const std::string& circuit_id) const;
    int n_buses() const { return static_cast<int>(buses.size()); }
};

struct AdmittanceMatrix {
    Eigen::MatrixXcd y; ///< dense; the studied systems are tiny
    int dimension() const { return static_cast<int>(y.rows()); }
};

/// Nodal admittance matrix of the passive network. Out-of-service branches
/// contribute nothing; active fault shunts are included.
AdmittanceMatrix build_ybus(const NetworkModel& net);

enum class EventKind { Trip, FaultOn, FaultClear };

struct TopologyEvent {
    EventKind kind = EventKind::Trip;
    std::string circuit_id;
    double fault_admittance = 1e5; ///< used by FaultOn
};

/// Returns an updated copy of the network. FaultOn adds the fault shunt at
/// the from-end of the circuit; FaultClear removes both the shunt and the
/// circuit; Trip takes the circuit out of service.
NetworkModel apply_topology_event(const NetworkModel& net, const TopologyEvent& ev);

} // namespace aclesim
