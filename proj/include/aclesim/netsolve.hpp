#pragma once

#include <functional>

#include <Eigen/Dense>

#include "aclesim/network.hpp"

namespace aclesim {

/// Constant-current / constant-admittance load frozen at an operating point.
/// The active part keeps its current magnitude (ramped down linearly below
/// v_ramp to stay numerically sane in faulted conditions); the reactive part
/// is a fixed shunt admittance folded into the solver matrix.
struct FrozenLoad {
    int bus_index = 0;
    double i_p = 0.0;    ///< pu current magnitude, system base
    Complex y_q{0.0, 0.0};
    double v_ramp = 0.4;
};

/// Injection callback: given the current voltage iterate, fill the nodal
/// current source vector (frozen-load currents are added by the solver).
using InjectionFn = std::function<void(const Eigen::VectorXcd& v, Eigen::VectorXcd& i_src)>;

struct NetworkSolution {
    Eigen::VectorXcd v;
    int iterations = 0;
    double residual = 0.0;
};

/// Holds the LU factorization of Ybus augmented with device shunt
/// admittances and frozen-load reactive admittances. Valid until the next
/// topology change.
class NetworkSolver {
  public:
    NetworkSolver(const AdmittanceMatrix& ybus,
                  const std::vector<std::pair<int, Complex>>& device_shunts,
                  std::vector<FrozenLoad> loads);

    /// Fixed-point iteration v <- Y^-1 * i(v) until max |Y v - i| < tol.
    NetworkSolution solve(const InjectionFn& injections, const Eigen::VectorXcd& v_guess,
                          double tol = 1e-10, int max_iter = 50) const;

    int dimension() const { return static_cast<int>(y_aug_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return y_aug_; }

  private:
    Eigen::MatrixXcd y_aug_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    std::vector<FrozenLoad> loads_;
};

/// Current drawn by a frozen constant-current load at voltage v.
Complex frozen_load_current(const FrozenLoad& load, Complex v);

} // namespace aclesim
