#include "wdmqkd/figures.hpp"

#include <cmath>
#include <sstream>

#include "wdmqkd/config.hpp"
#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/optimize.hpp"
#include "wdmqkd/parallel.hpp"

namespace wdmqkd {

namespace {

constexpr double kOmegaSep = 2.0 * detail::pi * 100e9;
constexpr double kHalfGridWidth = 2.0 * detail::pi * 50e9;

ChannelPlan std_plan(int n_pairs, CorrelationSign sign, ProfileKind profile = ProfileKind::Rect,
                     double width = kHalfGridWidth) {
    ChannelPlan p;
    p.n_pairs = n_pairs;
    p.sign = sign;
    p.omega_sep = kOmegaSep;
    p.profile = profile;
    p.width = width;
    return p;
}

SourceParams std_src(double sigma_cr, double tau_p, StatsKind stats = StatsKind::Poisson,
                     int modes = 1) {
    SourceParams s;
    s.sigma_cr = sigma_cr;
    s.tau_p = tau_p;
    s.mu = 0.1;
    s.stats = stats;
    s.modes = modes;
    return s;
}

LinkParams std_link(double t = 1e-3) {
    return LinkParams{t, t};
}

void push_meta(Table& t, const std::string& key, const std::string& value) {
    t.meta.emplace_back(key, value);
}

// K and mu* of the no-WDM baselines over a transmittance grid.
Table no_wdm_table(int jobs) {
    const auto grid = detail::logspace(1e-4, 1.0, 25);
    Table t;
    t.columns = {"transmittance", "k_thermal", "k_poisson", "ratio_poisson_thermal",
                 "mu_thermal", "mu_poisson"};
    t.rows.assign(grid.size(), {});
    detail::parallel_for(grid.size(), jobs, [&](std::size_t i) {
        const LinkParams link = std_link(grid[i]);
        SourceParams src = std_src(1.0, 1.0, StatsKind::Thermal);
        const MuOptResult th = optimize_nowdm_mu(src, link);
        src.stats = StatsKind::Poisson;
        const MuOptResult po = optimize_nowdm_mu(src, link);
        t.rows[i] = {grid[i], th.rate_star, po.rate_star,
                     th.rate_star > 0.0 ? po.rate_star / th.rate_star : 0.0, th.mu_star,
                     po.mu_star};
    });
    return t;
}

Table select_columns(const Table& src, const std::vector<std::size_t>& keep) {
    Table out;
    out.meta = src.meta;
    for (std::size_t c : keep) out.columns.push_back(src.columns[c]);
    for (const auto& row : src.rows) {
        std::vector<double> r;
        for (std::size_t c : keep) r.push_back(row[c]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

// Gain and optimal mu per N over one sweep axis; emits columns
// axis, g_n<N>..., mu_n<N>...
Table gain_table(SweepAxis axis, const std::vector<double>& grid, const std::vector<int>& ns,
                 const ChannelPlan& plan0, const SourceParams& src0, const LinkParams& link,
                 int jobs, const std::string& axis_col) {
    Table t;
    t.columns.push_back(axis_col);
    for (int n : ns) t.columns.push_back("g_n" + std::to_string(n));
    for (int n : ns) t.columns.push_back("mu_n" + std::to_string(n));
    t.rows.assign(grid.size(), std::vector<double>(1 + 2 * ns.size(), 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i][0] = grid[i];

    for (std::size_t k = 0; k < ns.size(); ++k) {
        SweepSpec spec;
        spec.axis = axis;
        spec.grid = grid;
        spec.plan = plan0;
        spec.plan.n_pairs = ns[k];
        spec.src = src0;
        spec.link = link;
        spec.optimize_mu = true;
        spec.with_gain = true;
        const auto rows = run_sweep(spec, jobs);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            t.rows[i][1 + k] = rows[i].ok ? rows[i].result.gain : std::nan("");
            t.rows[i][1 + ns.size() + k] = rows[i].ok ? rows[i].result.mu_used : std::nan("");
        }
    }
    return t;
}

Table fig4(double sigma_cr, bool mu_panel, int jobs) {
    const auto grid = detail::logspace(3e-12, 3e-9, 25);
    const Table full = gain_table(SweepAxis::TauP, grid, {1, 2, 4, 6, 8, 10},
                                  std_plan(1, CorrelationSign::Negative),
                                  std_src(sigma_cr, 3e-12), std_link(), jobs, "tau_p");
    std::vector<std::size_t> keep{0};
    for (std::size_t k = 0; k < 6; ++k) keep.push_back(mu_panel ? 7 + k : 1 + k);
    return select_columns(full, keep);
}

Table fig5(int jobs) {
    const auto grid = detail::logspace(1e-11, 1e-7, 32);
    SweepSpec spec;
    spec.axis = SweepAxis::TauP;
    spec.grid = grid;
    spec.plan = std_plan(1, CorrelationSign::Negative);
    spec.src = std_src(1e13, 1e-11);
    spec.link = std_link();
    spec.with_gain = false;
    const auto rows = run_sweep(spec, jobs);

    const double tau_recs[] = {0.1e-9, 1e-9, 10e-9, 100e-9};
    Table t;
    t.columns = {"tau_p", "r_trec_0p1ns", "r_trec_1ns", "r_trec_10ns", "r_trec_100ns", "k_per_use"};
    for (const auto& row : rows) {
        std::vector<double> r{row.axis_value};
        for (double trec : tau_recs)
            r.push_back(row.ok ? time_rate(row.result.k_total, trec, row.axis_value) : std::nan(""));
        r.push_back(row.ok ? row.result.k_total : std::nan(""));
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table fig6(bool mu_panel, int jobs) {
    const auto grid = detail::logspace(1e11, 3e13, 25);
    const Table full = gain_table(SweepAxis::SigmaCr, grid, {1, 2, 4, 6, 8, 10},
                                  std_plan(1, CorrelationSign::Negative),
                                  std_src(1e12, 333e-12), std_link(), jobs, "sigma_cr");
    std::vector<std::size_t> keep{0};
    for (std::size_t k = 0; k < 6; ++k) keep.push_back(mu_panel ? 7 + k : 1 + k);
    return select_columns(full, keep);
}

Table fig7(bool mu_panel, int jobs) {
    const auto grid = detail::logspace(3e-15, 3e-11, 25);
    const Table full = gain_table(SweepAxis::TauP, grid, {1, 2, 4, 6, 8, 10},
                                  std_plan(1, CorrelationSign::Positive),
                                  std_src(1e10, 1e-13), std_link(), jobs, "tau_p");
    std::vector<std::size_t> keep{0};
    for (std::size_t k = 0; k < 6; ++k) keep.push_back(mu_panel ? 7 + k : 1 + k);
    return select_columns(full, keep);
}

Table fig8(bool mu_panel, int jobs) {
    const auto grid = detail::logspace(1e9, 1e12, 25);
    const Table full = gain_table(SweepAxis::SigmaCr, grid, {1, 2, 4, 6, 8, 10},
                                  std_plan(1, CorrelationSign::Positive),
                                  std_src(1e10, 100e-15), std_link(), jobs, "sigma_cr");
    std::vector<std::size_t> keep{0};
    for (std::size_t k = 0; k < 6; ++k) keep.push_back(mu_panel ? 7 + k : 1 + k);
    return select_columns(full, keep);
}

Table fig9a(int jobs) {
    const auto grid = detail::logspace(1e11, 1e14, 25);
    const std::vector<int> ns{1, 3, 5};
    const Table rect = gain_table(SweepAxis::SigmaCr, grid, ns,
                                  std_plan(1, CorrelationSign::Negative, ProfileKind::Rect),
                                  std_src(1e12, 333e-12), std_link(), jobs, "sigma_cr");
    const Table gauss = gain_table(SweepAxis::SigmaCr, grid, ns,
                                   std_plan(1, CorrelationSign::Negative, ProfileKind::Gauss),
                                   std_src(1e12, 333e-12), std_link(), jobs, "sigma_cr");
    Table t;
    t.columns = {"sigma_cr"};
    for (int n : ns) t.columns.push_back("g_rect_n" + std::to_string(n));
    for (int n : ns) t.columns.push_back("g_gauss_n" + std::to_string(n));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> r{grid[i]};
        for (std::size_t k = 0; k < ns.size(); ++k) r.push_back(rect.rows[i][1 + k]);
        for (std::size_t k = 0; k < ns.size(); ++k) r.push_back(gauss.rows[i][1 + k]);
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table fig9b(int jobs) {
    (void)jobs;
    const auto grid = detail::logspace(1e11, 1e14, 41);
    Table t;
    t.columns = {"sigma_cr", "p_pm_over_p_pp"};
    const ChannelPair center{0, 0.0, 0.0};
    for (double sc : grid) {
        const BucketProbs b = bucket_probs_gauss(center, kHalfGridWidth, std_src(sc, 333e-12));
        t.rows.push_back({sc, b.p_pp > 0.0 ? b.p_pm / b.p_pp : 0.0});
    }
    return t;
}

Table fig10(int jobs) {
    const std::vector<int> m_grid{1, 2, 3, 5, 8, 12, 20, 30, 50, 100, 200, 500, 1000};
    // sigma_cr * tau_p products studied in the appendix, at the parameter
    // pairs the corresponding correlation scenarios use
    struct Case {
        double sigma_cr, tau_p;
        const char* label;
    };
    const Case cases[] = {{3e12, 9.5 / 3e12, "dk_sct_9p5"},
                          {3e12, 30.0 / 3e12, "dk_sct_30"},
                          {1e10, 0.1 / 1e10, "dk_sct_0p1"}};
    Table t;
    t.columns = {"m_modes"};
    for (const Case& c : cases) t.columns.push_back(c.label);
    t.rows.assign(m_grid.size(), std::vector<double>(4, 0.0));
    for (std::size_t i = 0; i < m_grid.size(); ++i) t.rows[i][0] = double(m_grid[i]);
    for (std::size_t ci = 0; ci < 3; ++ci) {
        const Case& c = cases[ci];
        detail::parallel_for(m_grid.size(), jobs, [&](std::size_t i) {
            t.rows[i][1 + ci] = appendix_delta_k(c.sigma_cr, c.tau_p, m_grid[i]);
        });
    }
    return t;
}

Table fig_width(int jobs) {
    const auto grid = detail::logspace(1e11, 3e13, 21);
    const std::vector<int> ns{1, 3, 5, 7, 9};
    const double widths[] = {2.0 * detail::pi * 100e9, 2.0 * detail::pi * 10e9};
    Table t;
    t.columns = {"sigma_cr"};
    for (double w : widths)
        for (int n : ns) {
            std::ostringstream name;
            name << "g_dw" << std::lround(w / (2.0 * detail::pi * 1e9)) << "ghz_n" << n;
            t.columns.push_back(name.str());
        }
    t.rows.assign(grid.size(), std::vector<double>(1 + 2 * ns.size(), 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i][0] = grid[i];
    std::size_t col = 1;
    for (double w : widths) {
        const Table g = gain_table(SweepAxis::SigmaCr, grid, ns,
                                   std_plan(1, CorrelationSign::Negative, ProfileKind::Rect, w),
                                   std_src(1e12, 333e-12), std_link(), jobs, "sigma_cr");
        for (std::size_t k = 0; k < ns.size(); ++k, ++col)
            for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i][col] = g.rows[i][1 + k];
    }
    return t;
}

}  // namespace

double appendix_delta_k(double sigma_cr, double tau_p, int modes, int jobs) {
    (void)jobs;
    const ChannelPlan plan = std_plan(1, CorrelationSign::Negative);
    const LinkParams link = std_link();
    SourceParams poisson = std_src(sigma_cr, tau_p, StatsKind::Poisson);
    SourceParams multi = std_src(sigma_cr, tau_p, StatsKind::Multimode, modes);
    const double k_poisson = optimize_wdm_mu(plan, poisson, link).rate_star;
    const double k_multi = optimize_wdm_mu(plan, multi, link).rate_star;
    if (!(k_poisson > 0.0)) throw NumericalError("appendix_delta_k: zero Poisson reference rate");
    return (k_multi - k_poisson) / k_poisson;
}

std::vector<FigureInfo> figure_registry() {
    return {
        {"3a", "no-WDM thermal key rate vs transmittance, mu-optimized"},
        {"3b", "no-WDM Poisson/thermal key-rate ratio vs transmittance"},
        {"3c", "no-WDM optimal mu vs transmittance, thermal and Poisson"},
        {"4a", "gain vs tau_p, sigma_cr = 3 THz, negative correlation, N = 1..10"},
        {"4b", "gain vs tau_p, sigma_cr = 10 THz, negative correlation, N = 1..10"},
        {"4c", "optimal mu vs tau_p for the 4a configuration"},
        {"4d", "optimal mu vs tau_p for the 4b configuration"},
        {"5", "bits per second vs tau_p for recovery times 0.1..100 ns, N = 1"},
        {"6a", "gain vs sigma_cr at tau_p = 333 ps, negative correlation"},
        {"6b", "optimal mu vs sigma_cr for the 6a configuration"},
        {"7a", "gain vs tau_p, sigma_cr = 10 GHz, positive correlation"},
        {"7b", "optimal mu vs tau_p for the 7a configuration"},
        {"8a", "gain vs sigma_cr at tau_p = 100 fs, positive correlation"},
        {"8b", "optimal mu vs sigma_cr for the 8a configuration"},
        {"9a", "gain vs sigma_cr, rectangular vs Gaussian profiles, N in {1,3,5}"},
        {"9b", "p_pm/p_pp for the Gaussian central pair vs sigma_cr"},
        {"10", "key-rate detuning of the M-mode statistics vs Poisson, N = 1"},
        {"width", "gain vs sigma_cr for channel widths 100 GHz and 10 GHz"},
    };
}

Table run_figure(const std::string& id, int jobs) {
    Table t;
    if (id == "3a") {
        t = select_columns(no_wdm_table(jobs), {0, 1, 4});
    } else if (id == "3b") {
        t = select_columns(no_wdm_table(jobs), {0, 1, 2, 3});
    } else if (id == "3c") {
        t = select_columns(no_wdm_table(jobs), {0, 4, 5});
    } else if (id == "4a") {
        t = fig4(3e12, false, jobs);
    } else if (id == "4b") {
        t = fig4(1e13, false, jobs);
    } else if (id == "4c") {
        t = fig4(3e12, true, jobs);
    } else if (id == "4d") {
        t = fig4(1e13, true, jobs);
    } else if (id == "5") {
        t = fig5(jobs);
    } else if (id == "6a") {
        t = fig6(false, jobs);
    } else if (id == "6b") {
        t = fig6(true, jobs);
    } else if (id == "7a") {
        t = fig7(false, jobs);
    } else if (id == "7b") {
        t = fig7(true, jobs);
    } else if (id == "8a") {
        t = fig8(false, jobs);
    } else if (id == "8b") {
        t = fig8(true, jobs);
    } else if (id == "9a") {
        t = fig9a(jobs);
    } else if (id == "9b") {
        t = fig9b(jobs);
    } else if (id == "10") {
        t = fig10(jobs);
    } else if (id == "width") {
        t = fig_width(jobs);
    } else {
        throw ConfigError("unknown figure id: " + id);
    }
    push_meta(t, "figure", id);
    return t;
}

}  // namespace wdmqkd
