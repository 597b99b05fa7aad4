// Acceptance suite: one quantitative criterion per section, each printed as a
// single PASS/FAIL line with the measured values. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wdmqkd/figures.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/mc.hpp"
#include "wdmqkd/optimize.hpp"
#include "test_util.hpp"

using namespace wdmqkd;

namespace {

constexpr double kSep = 2.0 * detail::pi * 100e9;
constexpr double kHalf = 2.0 * detail::pi * 50e9;

struct Outcome {
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_results;

template <typename Fn>
void criterion(const std::string& name, const Fn& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    out.name = name;
    try {
        const auto [pass, detail] = fn();
        out.pass = pass;
        out.detail = detail;
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", out.name.c_str(),
                out.detail.c_str(), out.seconds);
    std::fflush(stdout);
    g_results.push_back(out);
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

ChannelPlan plan_of(int n, CorrelationSign sign, ProfileKind profile, double width) {
    ChannelPlan p;
    p.n_pairs = n;
    p.sign = sign;
    p.omega_sep = kSep;
    p.profile = profile;
    p.width = width;
    return p;
}

SourceParams source_of(double sc, double tp, double mu, StatsKind stats, int modes = 1) {
    SourceParams s;
    s.sigma_cr = sc;
    s.tau_p = tp;
    s.mu = mu;
    s.stats = stats;
    s.modes = modes;
    return s;
}

// 1. mu-optimized no-WDM thermal/Poisson ratio at T = 1e-4 within [1.10, 1.16]
std::pair<bool, std::string> baseline_ratio() {
    const LinkParams link{1e-4, 1e-4};
    const double th =
        optimize_nowdm_mu(source_of(1e12, 1e-12, 0.1, StatsKind::Thermal), link).rate_star;
    const double po =
        optimize_nowdm_mu(source_of(1e12, 1e-12, 0.1, StatsKind::Poisson), link).rate_star;
    const double ratio = th / po;
    return {ratio >= 1.10 && ratio <= 1.16, fmt("K_thermal/K_poisson = %.4f in [1.10, 1.16]", ratio)};
}

// 2. long-pulse gain asymptote N * K_poisson / K_thermal within 5% for N = 1, 2
std::pair<bool, std::string> gain_asymptote() {
    const LinkParams link{1e-3, 1e-3};
    const double base = thermal_baseline_rate(link);
    const double poisson =
        optimize_nowdm_mu(source_of(1e13, 3e-9, 0.1, StatsKind::Poisson), link).rate_star;
    bool ok = true;
    std::string detail;
    for (int n : {1, 2}) {
        const auto plan = plan_of(n, CorrelationSign::Negative, ProfileKind::Rect, kHalf);
        const double k =
            optimize_wdm_mu(plan, source_of(1e13, 3e-9, 0.1, StatsKind::Poisson), link).rate_star;
        const double g = k / base;
        const double target = double(n) * poisson / base;
        const double rel = std::abs(g - target) / target;
        ok = ok && rel <= 0.05;
        detail += fmt("N=%d: G=%.4f vs %.4f (%.2f%%) ", n, g, target, 100.0 * rel);
    }
    return {ok, detail};
}

// 3. saturation of the total rate between N = 6 and N = 10 at sigma_cr = 3e12
std::pair<bool, std::string> saturation() {
    const LinkParams link{1e-3, 1e-3};
    const auto src = source_of(3e12, 1e-9, 0.1, StatsKind::Poisson);
    const double k6 =
        optimize_wdm_mu(plan_of(6, CorrelationSign::Negative, ProfileKind::Rect, kHalf), src, link)
            .rate_star;
    const double k10 =
        optimize_wdm_mu(plan_of(10, CorrelationSign::Negative, ProfileKind::Rect, kHalf), src,
                        link)
            .rate_star;
    const double ratio = k10 / k6;
    return {ratio < 1.02, fmt("k_total(N=10)/k_total(N=6) = %.4f, required < 1.02", ratio)};
}

// 4. the bits-per-second optimum sits at tau_rec/3 on a 32-point log grid
std::pair<bool, std::string> time_rate_optimum() {
    const LinkParams link{1e-3, 1e-3};
    const auto plan = plan_of(1, CorrelationSign::Negative, ProfileKind::Rect, kHalf);
    const auto grid = detail::logspace(1e-11, 1e-7, 32);
    std::vector<double> k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        k[i] = optimize_wdm_mu(plan, source_of(1e13, grid[i], 0.1, StatsKind::Poisson), link)
                   .rate_star;
    bool ok = true;
    std::string detail;
    for (double trec : {0.1e-9, 1e-9, 10e-9, 100e-9}) {
        std::size_t best = 0;
        double best_r = -1.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = std::min(1.0 / trec, 1.0 / (3.0 * grid[i])) * k[i];
            if (r > best_r) {
                best_r = r;
                best = i;
            }
        }
        const double lo = grid[best > 0 ? best - 1 : 0];
        const double hi = grid[best + 1 < grid.size() ? best + 1 : grid.size() - 1];
        const bool within = lo <= trec / 3.0 && trec / 3.0 <= hi;
        ok = ok && within;
        detail += fmt("trec=%.0es: argmax %.2es ", trec, grid[best]);
    }
    return {ok, detail + "(target tau_rec/3 within one step)"};
}

// 5. Gaussian-profile penalty: optimized rate ratio and the bucket ratio
std::pair<bool, std::string> gaussian_penalty() {
    const LinkParams link{1e-3, 1e-3};
    bool ok = true;
    std::string detail;
    for (int n : {1, 3, 5}) {
        const auto src = source_of(1e13, 333e-12, 0.1, StatsKind::Poisson);
        const double rect =
            optimize_wdm_mu(plan_of(n, CorrelationSign::Negative, ProfileKind::Rect, kHalf), src,
                            link)
                .rate_star;
        const double gauss =
            optimize_wdm_mu(plan_of(n, CorrelationSign::Negative, ProfileKind::Gauss, kHalf), src,
                            link)
                .rate_star;
        const double ratio = gauss / rect;
        ok = ok && ratio >= 0.4 && ratio <= 0.6;
        detail += fmt("N=%d: gauss/rect=%.3f ", n, ratio);
    }
    const auto b = bucket_probs_gauss(ChannelPair{0, 0.0, 0.0}, kHalf,
                                      source_of(1e14, 333e-12, 0.1, StatsKind::Poisson));
    const double r = b.p_pm / b.p_pp;
    const bool ratio_ok = r >= 0.45 && r <= 0.55;
    ok = ok && ratio_ok;
    detail += fmt("| p_pm/p_pp(sigma_cr=1e14) = %.4f, required [0.45, 0.55]", r);
    return {ok, detail};
}

// 6. total rate invariant under the grid rescaling for random configurations
std::pair<bool, std::string> rescale_invariance() {
    std::mt19937 gen(1234);
    const auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto sign = (i % 2) ? CorrelationSign::Positive : CorrelationSign::Negative;
        const auto profile = (i % 3) ? ProfileKind::Rect : ProfileKind::Gauss;
        const int n = 1 + int(uni(0.0, 5.0));
        const auto plan = plan_of(n, sign, profile, std::exp(uni(std::log(0.2), 0.0)) * kSep);
        const auto stats = (i % 4 == 0) ? StatsKind::Thermal : StatsKind::Poisson;
        const auto src = source_of(std::exp(uni(std::log(1e11), std::log(3e13))),
                                   std::exp(uni(std::log(1e-13), std::log(1e-10))),
                                   uni(0.02, 0.5), stats);
        const LinkParams link{std::exp(uni(std::log(1e-3), std::log(0.5))),
                              std::exp(uni(std::log(1e-3), std::log(0.5)))};
        const double k0 = total_wdm_rate(plan, src, link).k_total;
        if (!(k0 > 0.0)) continue;
        for (double factor : {0.1, 0.5, 2.0, 10.0}) {
            const auto r = rescale(plan, src, factor);
            const double k1 = total_wdm_rate(r.plan, r.src, link).k_total;
            worst = std::max(worst, std::abs(k1 - k0) / k0);
        }
    }
    return {worst < 1e-9, fmt("worst relative deviation %.2e over 20 configs x 4 factors", worst)};
}

// 7. exact-statistics key-rate detuning at the appendix's sigma_cr*tau_p values
std::pair<bool, std::string> multimode_detuning() {
    const double dk95 = appendix_delta_k(3e12, 9.5 / 3e12, 1000);
    const double dk95_deep = appendix_delta_k(3e12, 9.5 / 3e12, 2000);
    const double dk30 = appendix_delta_k(3e12, 30.0 / 3e12, 1000);
    const double dk01 = appendix_delta_k(1e10, 0.1 / 1e10, 1000);
    const bool a = dk95 >= 0.05 && dk95 <= 0.06 && std::abs(dk95_deep - dk95) < 5e-4;
    const bool b = std::abs(dk30) < 0.02;
    const bool c = dk01 >= 0.016 && dk01 <= 0.026;
    return {a && b && c,
            fmt("dK(9.5)=%.4f (M=2000: %.4f) in 0.055+-0.005 %s; dK(30)=%.4f <0.02 %s; "
                "dK(0.1)=%.4f in 0.021+-0.005 %s",
                dk95, dk95_deep, a ? "ok" : "VIOLATED", dk30, b ? "ok" : "VIOLATED", dk01,
                c ? "ok" : "VIOLATED")};
}

// 8. counting engine vs Monte-Carlo across signs, profiles and statistics
std::pair<bool, std::string> oracle_equivalence() {
    struct Config {
        ChannelPlan plan;
        SourceParams src;
        LinkParams link;
        std::uint64_t trials;
        std::uint64_t seed;
    };
    std::vector<Config> configs{
        {plan_of(3, CorrelationSign::Negative, ProfileKind::Rect, kHalf),
         source_of(3e12, 3.1667e-12, 0.2, StatsKind::Thermal), {0.5, 0.5}, 10'000'000, 11},
        {plan_of(5, CorrelationSign::Negative, ProfileKind::Rect, kHalf),
         source_of(1e13, 3.33e-10, 0.5, StatsKind::Poisson), {0.1, 0.1}, 10'000'000, 12},
        {plan_of(4, CorrelationSign::Positive, ProfileKind::Rect, kHalf),
         source_of(1e10, 1e-13, 0.3, StatsKind::Poisson), {0.3, 0.3}, 10'000'000, 13},
        {plan_of(3, CorrelationSign::Negative, ProfileKind::Gauss, kHalf),
         source_of(1e13, 3.33e-10, 0.4, StatsKind::Thermal), {0.2, 0.2}, 10'000'000, 14},
        {plan_of(2, CorrelationSign::Positive, ProfileKind::Gauss, kHalf),
         source_of(1e10, 1e-13, 0.6, StatsKind::Multimode, 64), {0.15, 0.15}, 10'000'000, 15},
        {plan_of(1, CorrelationSign::Negative, ProfileKind::Rect, kHalf),
         source_of(1e13, 333e-12, 0.0, StatsKind::Poisson), {1e-3, 1e-3}, 100'000'000, 16},
    };
    // the low-loss configuration runs at its own optimal intensity
    configs.back().src.mu =
        optimize_wdm_mu(configs.back().plan, configs.back().src, configs.back().link).mu_star;

    bool ok = true;
    double worst = 0.0;
    for (const auto& cfg : configs) {
        const auto est = simulate(cfg.plan, cfg.src, cfg.link, cfg.trials, cfg.seed);
        const auto grid = build_grid(cfg.plan);
        const auto dist = auto_pair_distribution(cfg.src, engine_tail_target(cfg.src, cfg.link));
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const auto t =
                click_table(bucket_probs(grid[c], cfg.plan, cfg.src), dist, dist, cfg.link);
            const double analytic[4] = {t.p_hh, t.p_hv, t.p_vh, t.p_vv};
            const double emp[4] = {est.per_pair[c].f_hh, est.per_pair[c].f_hv,
                                   est.per_pair[c].f_vh, est.per_pair[c].f_vv};
            for (int k = 0; k < 4; ++k) {
                const double se =
                    std::sqrt(analytic[k] * (1.0 - analytic[k]) / double(cfg.trials));
                const double dev = (se > 0.0) ? std::abs(emp[k] - analytic[k]) / se
                                              : (emp[k] == analytic[k] ? 0.0 : 1e9);
                worst = std::max(worst, dev);
                ok = ok && dev <= 3.0;
            }
        }
    }
    return {ok, fmt("6 configurations, worst pattern deviation %.2f sigma (limit 3)", worst)};
}

// 9. property bundle: normalization, closure, mirror symmetry, mass,
//    clamping/entropy endpoints, seeded determinism
std::pair<bool, std::string> property_suite() {
    std::string msg;
    bool ok = true;

    {  // |f|^2 normalization over an 8-sigma box
        const auto src = source_of(3e12, 3e-12, 0.1, StatsKind::Poisson);
        const double s = derived_params(src).sigma / detail::sqrt2;
        const double integral = test_util::integrate_density_weighted(
            src, [&](double ws, double wi) { return biphoton_density(ws, wi, src); }, -8.0 * s,
            8.0 * s, -8.0 * s, 8.0 * s);
        const bool pass = std::abs(integral - 1.0) < 1e-6;
        ok = ok && pass;
        msg += fmt("norm=%.2e ", std::abs(integral - 1.0));
    }
    {  // closure over a random set
        std::mt19937 gen(77);
        const auto uni = [&](double lo, double hi) {
            return std::uniform_real_distribution<double>(lo, hi)(gen);
        };
        double worst = 0.0;
        for (int i = 0; i < 16; ++i) {
            const auto profile = (i % 2) ? ProfileKind::Gauss : ProfileKind::Rect;
            const auto plan = plan_of(1 + (i % 6),
                                      (i % 3) ? CorrelationSign::Negative
                                              : CorrelationSign::Positive,
                                      profile, std::exp(uni(std::log(0.2), 0.0)) * kSep);
            const auto src = source_of(std::exp(uni(std::log(1e10), std::log(1e14))),
                                       std::exp(uni(std::log(1e-13), std::log(1e-9))), 0.1,
                                       StatsKind::Poisson);
            for (const auto& pair : build_grid(plan))
                worst = std::max(worst,
                                 std::abs(bucket_probs(pair, plan, src).sum() - 1.0));
        }
        ok = ok && worst < 1e-9;
        msg += fmt("closure=%.2e ", worst);
    }
    {  // mirror-pair rate symmetry
        const auto plan = plan_of(5, CorrelationSign::Negative, ProfileKind::Rect, kHalf);
        const auto res =
            total_wdm_rate(plan, source_of(3e12, 1e-11, 0.4, StatsKind::Poisson),
                           LinkParams{1e-3, 1e-3});
        double worst = 0.0;
        for (int n = 0; n < 2; ++n) {
            const auto& plus = res.per_pair[static_cast<std::size_t>(3 + n)];
            const auto& minus = res.per_pair[static_cast<std::size_t>(1 - n)];
            worst = std::max(worst,
                             std::abs(plus.key_rate - minus.key_rate) /
                                 std::max(plus.key_rate, 1e-300));
        }
        ok = ok && worst < 1e-10;
        msg += fmt("mirror=%.2e ", worst);
    }
    {  // distribution mass
        double worst = 0.0;
        for (auto kind : {StatsKind::Thermal, StatsKind::Poisson, StatsKind::Multimode}) {
            const auto d =
                auto_pair_distribution(source_of(3e12, 3.1667e-12, 0.8, kind, 64), 1e-12);
            worst = std::max(worst,
                             std::abs(detail::stable_sum(d.probs) + d.tail_bound - 1.0));
        }
        ok = ok && worst < 1e-12;
        msg += fmt("mass=%.1e ", worst);
    }
    {  // clamping and entropy endpoints
        const bool pass = secret_key_rate(0.3, 0.5) == 0.0 && secret_key_rate(0.3, 0.0) == 0.15 &&
                          binary_entropy(0.0) == 0.0 && binary_entropy(1.0) == 0.0;
        ok = ok && pass;
        msg += fmt("clamp/entropy=%s ", pass ? "ok" : "bad");
    }
    {  // seeded determinism, worker-count independent
        const auto plan = plan_of(2, CorrelationSign::Negative, ProfileKind::Rect, kHalf);
        const auto src = source_of(3e12, 1e-11, 0.3, StatsKind::Poisson);
        const auto a = simulate(plan, src, LinkParams{0.3, 0.3}, 1'000'000, 5, 1);
        const auto b = simulate(plan, src, LinkParams{0.3, 0.3}, 1'000'000, 5, 2);
        bool same = a.pairs_emitted == b.pairs_emitted;
        for (std::size_t i = 0; i < a.per_pair.size(); ++i)
            same = same && a.per_pair[i].n_hh == b.per_pair[i].n_hh &&
                   a.per_pair[i].n_hv == b.per_pair[i].n_hv &&
                   a.per_pair[i].n_vh == b.per_pair[i].n_vh &&
                   a.per_pair[i].n_vv == b.per_pair[i].n_vv;
        ok = ok && same;
        msg += fmt("determinism=%s", same ? "ok" : "bad");
    }
    return {ok, msg};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion("1 thermal/poisson baseline ratio", baseline_ratio);
    criterion("2 gain asymptote", gain_asymptote);
    criterion("3 saturation beyond six pairs", saturation);
    criterion("4 pulse-duration optimum", time_rate_optimum);
    criterion("5 gaussian-profile penalty", gaussian_penalty);
    criterion("6 rescale invariance", rescale_invariance);
    criterion("7 multimode key-rate detuning", multimode_detuning);
    criterion("8 oracle equivalence", oracle_equivalence);
    criterion("9 property suite", property_suite);

    int failures = 0;
    for (const auto& r : g_results) failures += r.pass ? 0 : 1;
    std::printf("%d/%zu criteria passed\n", int(g_results.size()) - failures, g_results.size());
    return failures == 0 ? 0 : 1;
}
