#include <doctest.h>

#include <cmath>

#include "wdmqkd/config.hpp"
#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"

using namespace wdmqkd;

TEST_SUITE_BEGIN("config");

TEST_CASE("unit parsing") {
    CHECK(parse_frequency("3 THz") == doctest::Approx(3e12));
    CHECK(parse_frequency("2pi 100 GHz") == doctest::Approx(2.0 * detail::pi * 100e9));
    CHECK(parse_frequency("2pi*50 GHz") == doctest::Approx(2.0 * detail::pi * 50e9));
    CHECK(parse_frequency("6.28e11") == doctest::Approx(6.28e11));
    CHECK(parse_frequency("1 rad/s") == doctest::Approx(1.0));
    CHECK(parse_time("333 ps") == doctest::Approx(333e-12));
    CHECK(parse_time("100 fs") == doctest::Approx(1e-13));
    CHECK(parse_time("1.5 ns") == doctest::Approx(1.5e-9));
    CHECK_THROWS_AS(parse_frequency("3 parsec"), ConfigError);
    CHECK_THROWS_AS(parse_time("fast"), ConfigError);
}

TEST_CASE("full configuration parse") {
    const std::string text = R"(
# example setup
[source]
sigma_cr = 3 THz
tau_p = 3.1667 ps
mu = optimize
stats = multimode 128

[channels]
n_pairs = 5
sign = negative
omega_sep = 2pi 100 GHz
profile = rect
width = 2pi 50 GHz

[link]
t = 1e-3

[sweep]
axis = tau_p
from = 3 ps
to = 3 ns
points = 16
scale = log

[mc]
trials = 250000
seed = 9

[output]
format = structured
)";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.source.sigma_cr == doctest::Approx(3e12));
    CHECK(cfg.source.tau_p == doctest::Approx(3.1667e-12));
    CHECK(cfg.optimize_mu);
    CHECK(cfg.source.stats == StatsKind::Multimode);
    CHECK(cfg.source.modes == 128);
    CHECK(cfg.channels.n_pairs == 5);
    CHECK(cfg.channels.sign == CorrelationSign::Negative);
    CHECK(cfg.channels.omega_sep == doctest::Approx(2.0 * detail::pi * 100e9));
    CHECK(cfg.link.t_a == doctest::Approx(1e-3));
    CHECK(cfg.link.t_b == doctest::Approx(1e-3));
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->points == 16);
    CHECK(cfg.sweep->from == doctest::Approx(3e-12));
    CHECK(cfg.mc.trials == 250000);
    CHECK(cfg.mc.seed == 9);
    CHECK(cfg.output.format == OutputFormat::Structured);
}

TEST_CASE("defaults follow the standard grid") {
    const RunConfig cfg = default_config();
    CHECK(cfg.channels.omega_sep == doctest::Approx(2.0 * detail::pi * 100e9));
    CHECK(cfg.channels.width == doctest::Approx(2.0 * detail::pi * 50e9));
    CHECK(cfg.link.t_a == doctest::Approx(1e-3));
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("errors carry the line and the field") {
    SUBCASE("unknown key") {
        try {
            parse_config("[source]\nsigmacr = 3 THz\n");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("line 2") != std::string::npos);
            CHECK(what.find("sigmacr") != std::string::npos);
        }
    }
    SUBCASE("bad unit names the field") {
        try {
            parse_config("[source]\nsigma_cr = 3 lightyears\n");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("source.sigma_cr") != std::string::npos);
        }
    }
    SUBCASE("unknown section") {
        CHECK_THROWS_AS(parse_config("[sources]\nsigma_cr = 3 THz\n"), ConfigError);
    }
    SUBCASE("bad enum") {
        CHECK_THROWS_AS(parse_config("[channels]\nsign = sideways\n"), ConfigError);
    }
    SUBCASE("overlapping channels rejected at parse time") {
        CHECK_THROWS_AS(parse_config("[channels]\nn_pairs = 3\nwidth = 2pi 150 GHz\n"),
                        ConfigError);
    }
}

TEST_CASE("round trip of the effective configuration") {
    RunConfig cfg = default_config();
    cfg.source.stats = StatsKind::Multimode;
    cfg.source.modes = 77;
    cfg.optimize_mu = true;
    SweepConfig sc;
    sc.axis = SweepAxis::SigmaCr;
    sc.from = 1e11;
    sc.to = 1e13;
    sc.points = 5;
    cfg.sweep = sc;
    const std::string text = render_config(cfg);
    const RunConfig back = parse_config(text);
    CHECK(render_config(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));

    RunConfig other = cfg;
    other.link.t_a = 0.5;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("sweep grids") {
    SweepConfig sc;
    sc.from = 1.0;
    sc.to = 100.0;
    sc.points = 3;
    sc.log_scale = true;
    const auto g = sc.make_grid();
    REQUIRE(g.size() == 3);
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(10.0));
    CHECK(g[2] == doctest::Approx(100.0));
    sc.log_scale = false;
    CHECK(sc.make_grid()[1] == doctest::Approx(50.5));
    sc.points = 0;
    CHECK_THROWS_AS(sc.make_grid(), ConfigError);
}

TEST_SUITE_END();
