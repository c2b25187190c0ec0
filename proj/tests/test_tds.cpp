#include <doctest.h>

#include <sstream>

#include "aclesim/tds.hpp"
#include "helpers.hpp"

using namespace aclesim;

TEST_CASE("event-free run holds the operating point") {
    Scenario sc = testutil::bundled_scenario();
    sc.events.clear();
    Simulator sim(sc);
    CHECK(sim.initial_residual() < 1e-6);
    const SimulationTrace tr = sim.run();
    CHECK(tr.termination == Termination::Completed);
    double worst = 0.0;
    const int col = tr.column("max_state_dev");
    for (size_t k = 0; k < tr.steps(); ++k)
        worst = std::max(worst, tr.rows[k][static_cast<size_t>(col)]);
    CHECK(worst < 1e-6);
    CHECK(tr.max_eq1_residual < 1e-8);
}

TEST_CASE("trace utilities") {
    SimulationTrace tr;
    tr.channels = {"a", "b"};
    tr.time = {0.0, 0.1, 0.2};
    tr.rows = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};

    CHECK(tr.column("b") == 1);
    CHECK(tr.value(2, "a") == 5.0);
    CHECK_THROWS_AS(tr.column("missing"), DataError);

    std::ostringstream os;
    tr.write_csv(os, 2);
    const std::string csv = os.str();
    CHECK(csv.find("t,a,b") != std::string::npos);
    CHECK(csv.find("0.1") == std::string::npos); // subsampled row dropped
    CHECK(csv.find("0.2") != std::string::npos);
}
