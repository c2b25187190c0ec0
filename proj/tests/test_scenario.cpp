#include <doctest.h>

#include <fstream>
#include <sstream>

#include "aclesim/scenario.hpp"
#include "helpers.hpp"

using namespace aclesim;

TEST_CASE("bundled scenario round-trips through the serializer") {
    const Scenario sc = load_scenario_file(testutil::bundled_scenario_path());
    const std::string once = serialize_scenario(sc);
    const Scenario back = parse_scenario(once);
    const std::string twice = serialize_scenario(back);
    CHECK(once == twice);

    // Spot checks against the dataset.
    CHECK(sc.network.freq_hz == 50.0);
    CHECK(sc.network.base_kv == 220.0);
    CHECK(sc.generators.size() == 4);
    CHECK(sc.generators[0].machine.params.h == doctest::Approx(4.5));
    CHECK(sc.generators[2].machine.params.h == doctest::Approx(4.175));
    CHECK(sc.acle.k == doctest::Approx(1.0));
    CHECK(sc.acle.t_filter == doctest::Approx(0.75));
    CHECK(back.acle.p_max == doctest::Approx(sc.acle.p_max));
    CHECK(sc.acle.p_max == doctest::Approx(0.95)); // 950 MW clamp on the 1000 MVA base
    CHECK(sc.x_hvdc_info == doctest::Approx(0.1));
}

TEST_CASE("scalar overrides rewrite the raw document") {
    std::ifstream in(testutil::bundled_scenario_path());
    std::stringstream buf;
    buf << in.rdbuf();
    SectionDoc doc = parse_scenario_text(buf.str());
    apply_override(doc, "acle.k_pu_per_rad=4");
    apply_override(doc, "solver.t_end=5");
    const Scenario sc = build_scenario(doc);
    CHECK(sc.acle.k == doctest::Approx(4.0));
    CHECK(sc.solver.t_end == doctest::Approx(5.0));

    CHECK_THROWS_AS(apply_override(doc, "acle.k_pu_per_rad"), DataError);
}

TEST_CASE("load_scenario_file applies overrides") {
    const Scenario sc =
        load_scenario_file(testutil::bundled_scenario_path(), {"acle.mode=constant_p"});
    CHECK(sc.acle.mode == AcleMode::ConstantP);
}

TEST_CASE("content hash is stable and content-sensitive") {
    const std::string a = "alpha";
    CHECK(content_hash(a) == content_hash("alpha"));
    CHECK(content_hash(a) != content_hash("alphb"));
}

TEST_CASE("dispatch view carries the droop-weighted participation") {
    const Scenario sc = testutil::bundled_scenario();
    const auto gens = sc.dispatch(true);
    REQUIRE(gens.size() == 4);
    const double w = gens[0].participation;
    CHECK(w > 0.0);
    for (const auto& g : gens)
        CHECK(g.participation == doctest::Approx(w)); // identical units share equally
}
