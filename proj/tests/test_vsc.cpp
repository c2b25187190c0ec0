#include <doctest.h>

#include <cmath>

#include "aclesim/vsc.hpp"
#include "helpers.hpp"

using namespace aclesim;

namespace {

VscParams link_converter() {
    VscParams p;
    p.name = "VSC";
    p.ac_bus = 6;
    p.dc_bus = 1;
    p.loss.a = 5.25e-3;
    p.loss.b = 1.65e-3;
    p.loss.c_rec = 2.10e-3;
    p.loss.c_inv = 3.14e-3;
    return p;
}

} // namespace

TEST_CASE("outer control references") {
    VscParams p = link_converter();
    VscState s{};
    VscFlags f{};

    SUBCASE("P mode divides the feedforward by the PCC voltage") {
        const VscReferences r = outer_control(p, 0.438, 1.0, 1.0, s, f);
        CHECK(r.i_d_ref == doctest::Approx(0.438).epsilon(1e-12));
        CHECK(r.i_q_ref == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("DC-voltage PI proportional path") {
        p.d_mode = ConverterControl::DcVoltage;
        p.u_dc_set = 1.0;
        const VscReferences r = outer_control(p, 0.0, 1.0, 0.99, s, f);
        CHECK(std::abs(std::abs(r.i_d_ref) - p.kp_udc * 0.01) < 1e-12);
    }
}

TEST_CASE("current limiting keeps d-axis priority") {
    VscParams p = link_converter();
    VscFlags f{};

    VscReferences r;
    r.i_d_ref = 0.9;
    r.i_q_ref = 0.6;
    r = enforce_limits(p, r, f);
    CHECK(r.i_d_ref == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.i_q_ref == doctest::Approx(std::sqrt(1.0 - 0.81)).epsilon(1e-9));
    CHECK(f.current_limited);

    r.i_d_ref = 1.2;
    r.i_q_ref = 0.1;
    r = enforce_limits(p, r, f);
    CHECK(r.i_d_ref == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.i_q_ref == doctest::Approx(0.0).epsilon(1e-12));

    r.i_d_ref = 0.3;
    r.i_q_ref = -0.5;
    VscFlags f2{};
    r = enforce_limits(p, r, f2);
    CHECK(r.i_d_ref == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.i_q_ref == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK_FALSE(f2.current_limited);
}

TEST_CASE("closed-loop current lag is first order") {
    VscParams p = link_converter();
    VscState s{};
    VscReferences r;
    r.i_d_ref = 1.0;

    SUBCASE("reference reached means zero derivative") {
        s.i_d = 1.0;
        const VscDerivatives d = vsc_dynamics(p, s, r, 1.0);
        CHECK(std::abs(d.di_d) < 1e-12);
    }
    SUBCASE("step response hits 1 - 1/e at one time constant") {
        const double dt = p.tau / 2000.0;
        const int n_tau = 2000;
        for (int k = 0; k < 5 * n_tau; ++k) {
            // RK4 on the scalar lag
            auto f = [&](double i) { return vsc_dynamics(p, [&] { VscState t = s; t.i_d = i; return t; }(), r, 1.0).di_d; };
            const double k1 = f(s.i_d);
            const double k2 = f(s.i_d + dt / 2 * k1);
            const double k3 = f(s.i_d + dt / 2 * k2);
            const double k4 = f(s.i_d + dt * k3);
            s.i_d += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            if (k + 1 == n_tau)
                CHECK(s.i_d == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
        }
        CHECK(std::abs(s.i_d - 1.0) < 0.01); // settled after five time constants
    }
}

TEST_CASE("DC coupling power balance") {
    VscParams p = link_converter();

    SUBCASE("idle converter draws only the no-load loss") {
        VscState s{};
        const DcCoupling c = dc_coupling(p, s, 1.0, 1.0, 1000.0);
        CHECK(c.p_c == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(c.p_dc == doctest::Approx(-5.25e-3).epsilon(1e-12));
    }
    SUBCASE("lossless converter passes the power through") {
        p.loss = {};
        VscState s{};
        s.i_d = 0.62;
        s.i_q = -0.1;
        const DcCoupling c = dc_coupling(p, s, 1.0, 1.0, 1000.0);
        CHECK(c.p_dc == doctest::Approx(-c.p_c).epsilon(1e-12));
    }
}

TEST_CASE("DC grid derivatives") {
    const Scenario sc = testutil::bundled_scenario();
    const DcGridSpec& grid = sc.dc;

    SUBCASE("flat no-flow state is an equilibrium") {
        DcGridState s;
        s.u = Eigen::VectorXd::Ones(2);
        s.i_line = Eigen::VectorXd::Zero(1);
        const DcGridDerivatives d = dc_grid_derivatives(grid, s, Eigen::VectorXd::Zero(2));
        CHECK(d.du.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(d.di.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("steady line current obeys Ohm's law") {
        const double r_pu = grid.lines[0].r_ohm / grid.z_base_ohm();
        DcGridState s;
        s.u = Eigen::VectorXd::Ones(2);
        s.u(0) = 1.0 + r_pu * 0.5; // supports i = 0.5 pu
        s.i_line = Eigen::VectorXd::Constant(1, 0.5);
        Eigen::VectorXd inj(2);
        inj << 0.5, -0.5;
        const DcGridDerivatives d = dc_grid_derivatives(grid, s, inj);
        CHECK(d.du.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(d.di.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("cable time constant carried by the data") {
        CHECK(grid.lines[0].l_henry / (grid.lines[0].r_ohm) ==
              doctest::Approx(0.9339e-3 / 0.0137).epsilon(1e-9));
    }
}
