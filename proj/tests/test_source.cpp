#include <doctest.h>

#include <cmath>
#include <numeric>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/source.hpp"
#include "test_util.hpp"

using namespace wdmqkd;
using test_util::make_source;

TEST_SUITE_BEGIN("source");

TEST_CASE("biphoton density peak value and exchange symmetry") {
    const auto src = make_source(3e12, 3e-12, 0.1);
    // at zero detuning only the normalization prefactor survives
    CHECK(biphoton_density(0.0, 0.0, src) ==
          doctest::Approx(2.0 * 3e-12 / (detail::pi * 3e12)).epsilon(1e-12));

    test_util::ParamGen gen(11);
    for (int i = 0; i < 20; ++i) {
        const double a = gen.uniform(-5e12, 5e12);
        const double b = gen.uniform(-5e12, 5e12);
        CHECK(biphoton_density(a, b, src) == doctest::Approx(biphoton_density(b, a, src)));
    }
}

TEST_CASE("biphoton density normalizes to one over an 8-sigma box") {
    for (const auto& src : {make_source(3e12, 3e-12, 0.1), make_source(1e10, 1e-13, 0.1),
                            make_source(1e13, 3.33e-10, 0.1)}) {
        const double s = derived_params(src).sigma / detail::sqrt2;  // marginal std
        const double box = 8.0 * s;
        const double integral = test_util::integrate_density_weighted(
            src, [&](double ws, double wi) { return biphoton_density(ws, wi, src); }, -box, box,
            -box, box);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("spectral correlation coefficient") {
    SUBCASE("vanishes at sigma_cr*tau_p = 2") {
        CHECK(derived_params(make_source(2e12, 1e-12, 0.0)).rho == doctest::Approx(0.0));
    }
    SUBCASE("limits") {
        CHECK(derived_params(make_source(1e13, 1e-9, 0.0)).rho == doctest::Approx(-1.0).epsilon(1e-6));
        CHECK(derived_params(make_source(1e9, 1e-15, 0.0)).rho == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("reference point") {
        // direct evaluation: (4 - 9.5001^2)/(4 + 9.5001^2)
        CHECK(derived_params(make_source(3e12, 3.1667e-12, 0.0)).rho ==
              doctest::Approx(-0.915121).epsilon(1e-5));
    }
    SUBCASE("matches the moments of the density") {
        // rho equals Cov/Var of the Gaussian in (1); check via the quadrature oracle
        const auto src = make_source(2e12, 1.3e-12, 0.0);
        const double s = derived_params(src).sigma / detail::sqrt2;
        const double box = 9.0 * s;
        const auto moment = [&](int es, int ei) {
            return test_util::integrate_density_weighted(
                src,
                [&](double ws, double wi) {
                    return std::pow(ws / s, es) * std::pow(wi / s, ei) *
                           biphoton_density(ws, wi, src);
                },
                -box, box, -box, box);
        };
        const double var_s = moment(2, 0);
        const double cov = moment(1, 1);
        CHECK(cov / var_s == doctest::Approx(derived_params(src).rho).epsilon(1e-5));
    }
}

TEST_CASE("mode strengths") {
    SUBCASE("single-mode point") {
        const auto lam = mode_strengths(make_source(2e12, 1e-12, 0.0), 4);
        CHECK(lam[0] == doctest::Approx(1.0));
        CHECK(lam[1] == 0.0);
        CHECK(lam[2] == 0.0);
    }
    SUBCASE("sums to one and decays geometrically") {
        const auto src = make_source(3e12, 3.1667e-12, 0.0);  // sigma_cr*tau_p = 9.5
        const auto lam = mode_strengths(src, 200);
        CHECK(std::accumulate(lam.begin(), lam.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        const double r0 = lam[1] / lam[0];
        for (int m = 1; m < 20; ++m) CHECK(lam[m + 1] / lam[m] == doctest::Approx(r0).epsilon(1e-12));
        const double st = 9.5001;
        CHECK(r0 == doctest::Approx(std::pow((2.0 - st) / (2.0 + st), 2)).epsilon(1e-4));
    }
}

TEST_CASE("pair number distributions") {
    SUBCASE("thermal geometric law") {
        const auto d = pair_distribution(make_source(1e12, 1e-12, 1.0, StatsKind::Thermal), 50);
        CHECK(d.probs[0] == doctest::Approx(0.5));
        CHECK(d.probs[1] == doctest::Approx(0.25));
        // one HV and one VH pair: pi(1)^2 = mu^2/(mu+1)^4
        CHECK(d.probs[1] * d.probs[1] == doctest::Approx(1.0 / 16.0));
    }
    SUBCASE("poisson law") {
        const auto d = pair_distribution(make_source(1e12, 1e-12, 1.0, StatsKind::Poisson), 50);
        CHECK(d.probs[1] == doctest::Approx(std::exp(-1.0)));
        CHECK(d.probs[1] * d.probs[1] == doctest::Approx(std::exp(-2.0)));
    }
    SUBCASE("zero intensity emits nothing") {
        for (auto kind : {StatsKind::Thermal, StatsKind::Poisson, StatsKind::Multimode}) {
            const auto d = pair_distribution(make_source(1e12, 1e-12, 0.0, kind, 8), 5);
            CHECK(d.probs[0] == 1.0);
            CHECK(d.tail_bound == 0.0);
        }
    }
    SUBCASE("multimode at the single-mode point equals thermal") {
        const auto th = pair_distribution(make_source(2e12, 1e-12, 0.7, StatsKind::Thermal), 30);
        const auto mm =
            pair_distribution(make_source(2e12, 1e-12, 0.7, StatsKind::Multimode, 16), 30);
        for (int k = 0; k <= 30; ++k)
            CHECK(mm.probs[k] == doctest::Approx(th.probs[k]).epsilon(1e-12));
    }
    SUBCASE("insufficient truncation is rejected") {
        CHECK_THROWS_AS(pair_distribution(make_source(1e12, 1e-12, 1.0, StatsKind::Thermal), 1,
                                          1e-9),
                        NumericalError);
    }
    SUBCASE("mass accounting") {
        test_util::ParamGen gen(5);
        for (int i = 0; i < 12; ++i) {
            const auto kind =
                std::array{StatsKind::Thermal, StatsKind::Poisson, StatsKind::Multimode}[gen.pick(3)];
            const auto src = make_source(3e12, gen.log_uniform(1e-13, 1e-11),
                                         gen.log_uniform(1e-3, 3.0), kind, 32);
            const auto d = auto_pair_distribution(src, 1e-11);
            const double mass = detail::stable_sum(d.probs) + d.tail_bound;
            CHECK(mass >= 1.0 - 1e-12);
            CHECK(mass <= 1.0 + 1e-12);
            CHECK(d.tail_bound <= 1e-11);
        }
    }
}

TEST_CASE("multimode approaches poisson for many weak modes") {
    // sigma_cr*tau_p = 100: total-variation distance below 0.02 for mu <= 2
    for (double mu : {0.5, 2.0}) {
        const auto mm =
            pair_distribution(make_source(1e13, 1e-11, mu, StatsKind::Multimode, 200), 80);
        const auto po = pair_distribution(make_source(1e13, 1e-11, mu, StatsKind::Poisson), 80);
        double tv = 0.0;
        for (int k = 0; k <= 80; ++k) tv += std::abs(mm.probs[k] - po.probs[k]);
        tv = 0.5 * (tv + mm.tail_bound + po.tail_bound);
        CHECK(tv < 0.02);
    }
}

TEST_CASE("auto k_max honors the requested tail") {
    for (auto kind : {StatsKind::Thermal, StatsKind::Poisson, StatsKind::Multimode}) {
        const auto src = make_source(3e12, 3.1667e-12, 0.8, kind, 64);
        const int k = auto_k_max(src, 1e-10);
        const auto d = pair_distribution(src, k, 1e-10);
        CHECK(d.tail_bound <= 1e-10);
    }
}

TEST_CASE("source parameter validation") {
    CHECK_THROWS_AS(make_source(-1.0, 1e-12, 0.1).validate(), ConfigError);
    CHECK_THROWS_AS(make_source(1e12, 0.0, 0.1).validate(), ConfigError);
    CHECK_THROWS_AS(make_source(1e12, 1e-12, -0.5).validate(), ConfigError);
    CHECK_THROWS_AS(make_source(1e12, 1e-12, 0.5, StatsKind::Multimode, 0).validate(),
                    ConfigError);
}

TEST_SUITE_END();
