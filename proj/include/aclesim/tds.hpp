#pragma once

#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "aclesim/scenario.hpp"

namespace aclesim {

enum class Termination { Completed, LossOfSynchronism, DcCollapse, SolverFailure };

struct SimulationTrace {
    std::vector<double> time;
    std::vector<std::string> channels;
    std::vector<std::vector<double>> rows; ///< rows[k][c], aligned with time
    Termination termination = Termination::Completed;
    double termination_time = 0.0;
    std::string termination_detail;
    double max_eq1_residual = 0.0;

    int column(const std::string& name) const;
    double value(size_t step, const std::string& name) const;
    const std::vector<double>& row(size_t step) const { return rows[step]; }
    size_t steps() const { return time.size(); }
    void write_csv(std::ostream& os, int subsample = 1) const;
};

struct SimOverrides {
    double loss_of_sync_threshold = std::numbers::pi; ///< rad, max pairwise machine angle
};

/// Full pipeline for one scenario: operating point, device initialization,
/// partitioned time stepping with event handling.
class Simulator {
  public:
    explicit Simulator(Scenario scenario, SimOverrides overrides = {});

    SimulationTrace run();

    const Scenario& scenario() const { return scenario_; }
    const AcleOperatingPoint& operating_point() const { return *op_; }
    /// Max |dx/dt| over all states at the initial point (equilibrium check).
    double initial_residual();

  private:
    struct Impl;
    Scenario scenario_;
    SimOverrides overrides_;
    std::shared_ptr<AcleOperatingPoint> op_;
    std::shared_ptr<Impl> impl_;
};

SimulationTrace run_simulation(const Scenario& scenario);

struct StepConvergence {
    bool comparable = false;
    double max_angle_deviation_rad = 0.0;
};

/// Re-runs the scenario at dt and dt_half and compares machine angle
/// trajectories on the coarse grid.
StepConvergence step_convergence_check(const Scenario& scenario, double dt, double dt_half);

} // namespace aclesim
