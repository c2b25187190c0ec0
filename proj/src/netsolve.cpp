#include "aclesim/netsolve.hpp"

#include <cmath>

namespace aclesim {

Complex frozen_load_current(const FrozenLoad& load, Complex v) {
    const double vm = std::abs(v);
    if (vm < 1e-9 || load.i_p == 0.0)
        return {0.0, 0.0};
    const double ramp = vm < load.v_ramp ? vm / load.v_ramp : 1.0;
    // Draws active power along the local voltage phase: injection is -i_p * v/|v|.
    return -load.i_p * ramp * (v / vm);
}

NetworkSolver::NetworkSolver(const AdmittanceMatrix& ybus,
                             const std::vector<std::pair<int, Complex>>& device_shunts,
                             std::vector<FrozenLoad> loads)
    : y_aug_(ybus.y), loads_(std::move(loads)) {
    for (const auto& [idx, y] : device_shunts)
        y_aug_(idx, idx) += y;
    for (const auto& ld : loads_)
        y_aug_(ld.bus_index, ld.bus_index) += ld.y_q;
    lu_.compute(y_aug_);
    const double cond_floor = y_aug_.cwiseAbs().maxCoeff();
    if (!(std::abs(lu_.determinant()) > 1e-12 * std::pow(cond_floor, dimension() > 0 ? 1 : 0)))
        throw TopologyError("network admittance matrix is singular");
}

NetworkSolution NetworkSolver::solve(const InjectionFn& injections,
                                     const Eigen::VectorXcd& v_guess, double tol,
                                     int max_iter) const {
    const int n = dimension();
    Eigen::VectorXcd v = v_guess.size() == n ? v_guess : Eigen::VectorXcd::Ones(n).eval();
    Eigen::VectorXcd i_src(n);

    auto rhs = [&](const Eigen::VectorXcd& vk) {
        i_src.setZero();
        if (injections)
            injections(vk, i_src);
        for (const auto& ld : loads_)
            i_src(ld.bus_index) += frozen_load_current(ld, vk(ld.bus_index));
        return i_src;
    };

    double residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXcd i = rhs(v);
        residual = (y_aug_ * v - i).cwiseAbs().maxCoeff();
        if (residual < tol)
            return {v, it - 1, residual};
        v = lu_.solve(i);
    }
    throw SolverError("network solution did not converge, residual " + std::to_string(residual));
}

} // namespace aclesim
