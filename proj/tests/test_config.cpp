#include "delayrc/config.hpp"

#include <doctest.h>

#include <cmath>

using namespace delayrc;

TEST_CASE("empty configuration gives desk-scale defaults") {
    const ExperimentConfig c = parse_config("", "x.json");
    CHECK(c.length == 20000);
    CHECK(c.buffer == 5000);
    CHECK(c.capacity.max_delay == 100);
    CHECK(c.capacity.max_degree == 5);
    CHECK(c.capacity.cutoff == doctest::Approx(0.001));
    CHECK(c.laser.eta == doctest::Approx(0.01));
    CHECK(c.laser.noise == doctest::Approx(1e-7));
    CHECK(c.laser.dt == doctest::Approx(0.01));
    CHECK(c.nodes == 10);
    CHECK(c.eigen_count == 100);
    CHECK(c.grid_size() == 1);
}

TEST_CASE("full-scale lengths") {
    ExperimentConfig c = parse_config("{}", "x.json");
    apply_paper_scale(c);
    CHECK(c.length == 250000);
    CHECK(c.buffer == 100000);
    CHECK(c.capacity.max_delay == 500);
    CHECK(c.narma.train == 25000);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("sections, theta and overrides") {
    const std::string text = R"({
  "laser": {"kappa": 0.1, "pump": -0.095, "tau": 500},
  "reservoir": {"nodes": 50, "theta": 7},
  "sweep": {"mode": "spectra",
            "axes": [{"parameter": "kappa", "min": 0.05, "max": 0.2, "count": 4},
                     {"parameter": "t_lk", "min": 0.1, "max": 100, "count": 7, "scale": "log"}]},
  "seeds": {"mask": 10, "input": 11, "noise": 12}
})";
    const ExperimentConfig c = parse_config(text, "x.json", {"laser.pump=0.095", "spectrum.newton=true"});
    CHECK(c.laser.kappa == doctest::Approx(0.1));
    CHECK(c.laser.pump == doctest::Approx(0.095));
    CHECK(c.clock_cycle == doctest::Approx(350.0));
    CHECK(c.newton);
    CHECK(c.mode == SweepMode::spectra);
    CHECK(c.grid_size() == 28);
    CHECK(c.seeds.noise == 12);
    const auto v = c.axes[1].values();
    REQUIRE(v.size() == 7);
    CHECK(v.front() == doctest::Approx(0.1));
    CHECK(v[3] == doctest::Approx(std::sqrt(10.0)));
    CHECK(v.back() == 100.0);
    CHECK(c.axes[0].values()[1] == doctest::Approx(0.1));
}

TEST_CASE("diagnostics point at the offending line") {
    const std::string text = "{\n  \"laser\": {\n    \"kappa\": 0.1,\n    \"kapa\": 0.2\n  }\n}\n";
    try {
        (void)parse_config(text, "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("cfg.json:4:") == 0);
        CHECK(std::string(e.what()).find("kapa") != std::string::npos);
    }

    const std::string syntax = "{\n  \"laser\": {\n    \"kappa\": 0.1,\n  }\n}\n";
    try {
        (void)parse_config(syntax, "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
    }

    const std::string typed = "{\n \"reservoir\": {\n  \"nodes\": \"ten\"\n }\n}";
    try {
        (void)parse_config(typed, "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }

    const std::string axis = "{\"sweep\": {\"axes\": [\n {\"parameter\": \"kappa\", \"min\": 0, \"max\": 1,\n  \"count\": 3, \"scale\": \"log\"}]}}";
    try {
        (void)parse_config(axis, "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("positive") != std::string::npos);
    }
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS((void)parse_config("{\"bogus\": {}}", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("[]", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{\"laser\": {\"tau\": 0.005}}", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{\"reservoir\": {\"theta\": 2, \"clock_cycle\": 20}}", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{\"sweep\": {\"mode\": \"fast\"}}", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config(
                        "{\"sweep\": {\"axes\": [{\"parameter\": \"colour\", \"min\": 0, \"max\": 1}]}}", "x"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config(
                        "{\"sweep\": {\"axes\": [{\"parameter\": \"kappa\", \"min\": 0, \"count\": 0}]}}", "x"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config("{\"capacity\": {\"max_delay\": 6000}}", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config("{}", "x", {"novalue"}), ConfigError);
    try {
        (void)parse_config("{}", "x", {"laser.kapa=1"});
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.source() == "override");
        CHECK(std::string(e.what()).find("laser.kapa=1") != std::string::npos);
    }
}

TEST_CASE("parameter setters and tau ratio") {
    ExperimentConfig c;
    c.nodes = 50;
    set_parameter(c, "theta", 2.0);
    CHECK(c.clock_cycle == doctest::Approx(100.0));
    set_parameter(c, "tau_ratio", 1.41);
    apply_tau_ratio(c);
    CHECK(c.laser.tau == doctest::Approx(141.0));
    CHECK_THROWS_AS(set_parameter(c, "nope", 1.0), std::invalid_argument);
    CHECK_NOTHROW(c.laser.validate());
}
