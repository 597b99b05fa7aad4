#include "wdmqkd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/parallel.hpp"

namespace wdmqkd {

namespace {

struct Tracker {
    const std::function<double(double)>* f;
    double best_mu = 0.0;
    double best_rate = -std::numeric_limits<double>::infinity();
    double lowest = std::numeric_limits<double>::infinity();
    int evals = 0;

    double operator()(double mu) {
        const double r = (*f)(mu);
        ++evals;
        if (r > best_rate) {
            best_rate = r;
            best_mu = mu;
        }
        lowest = std::min(lowest, r);
        return r;
    }

    bool flat() const { return !(best_rate > lowest); }
};

// Exactly one rise followed by one fall (plateaus allowed) marks a unimodal
// scan; all-equal values do not.
bool is_unimodal(const std::vector<double>& v) {
    const double span = *std::max_element(v.begin(), v.end()) -
                        *std::min_element(v.begin(), v.end());
    if (!(span > 0.0)) return false;
    const double tol = 1e-12 * span;
    int phase = 0;  // 0 rising, 1 falling
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double d = v[i] - v[i - 1];
        if (d > tol && phase == 1) return false;
        if (d < -tol) phase = 1;
    }
    return true;
}

void golden_section(Tracker& track, double lo, double hi, double mu_rel_tol) {
    constexpr double invphi = 0.61803398874989484820;
    double a = std::log(lo), b = std::log(hi);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = track(std::exp(x1));
    double f2 = track(std::exp(x2));
    const double width_tol = std::log1p(mu_rel_tol);
    while (b - a > width_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = track(std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = track(std::exp(x1));
        }
    }
}

}  // namespace

MuOptResult optimize_mu(const std::function<double(double)>& objective, double mu_lo,
                        double mu_hi, double mu_rel_tol) {
    if (!(mu_lo > 0.0 && mu_hi > mu_lo)) throw ConfigError("mu bounds must satisfy 0 < lo < hi");
    Tracker track{&objective};

    constexpr std::size_t prescan = 16;
    const auto grid = detail::logspace(mu_lo, mu_hi, prescan);
    std::vector<double> vals(prescan);
    for (std::size_t i = 0; i < prescan; ++i) vals[i] = track(grid[i]);

    const std::size_t peak = static_cast<std::size_t>(
        std::max_element(vals.begin(), vals.end()) - vals.begin());

    MuOptResult res;
    if (peak == 0 || peak + 1 == prescan) {
        // maximum sits at (or beyond) a bound; refine toward it anyway
        res.bracket_failure = true;
        const std::size_t a = (peak == 0) ? 0 : peak - 1;
        const std::size_t b = (peak == 0) ? 1 : peak;
        if (!track.flat()) golden_section(track, grid[a], grid[b], mu_rel_tol);
    } else if (is_unimodal(vals)) {
        golden_section(track, grid[peak - 1], grid[peak + 1], mu_rel_tol);
    } else {
        // dense fallback: 64 points per decade, then local refinement
        const double decades = std::log10(mu_hi / mu_lo);
        const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(64.0 * decades));
        const auto dense = detail::logspace(mu_lo, mu_hi, n);
        std::vector<double> dvals(n);
        for (std::size_t i = 0; i < n; ++i) dvals[i] = track(dense[i]);
        const std::size_t dpeak = static_cast<std::size_t>(
            std::max_element(dvals.begin(), dvals.end()) - dvals.begin());
        const std::size_t a = (dpeak == 0) ? 0 : dpeak - 1;
        const std::size_t b = (dpeak + 1 >= n) ? n - 1 : dpeak + 1;
        if (dpeak == 0 || dpeak + 1 == n) res.bracket_failure = true;
        if (a < b) golden_section(track, dense[a], dense[b], mu_rel_tol);
    }

    res.mu_star = track.best_mu;
    res.rate_star = track.best_rate;
    res.evaluations = track.evals;
    if (track.flat()) {
        res.bracket_failure = true;  // a constant objective has no interior maximum
        res.mu_star = mu_lo;
    }
    return res;
}

MuOptResult optimize_wdm_mu(const ChannelPlan& plan, SourceParams src, const LinkParams& link,
                            double mu_lo, double mu_hi) {
    const auto grid = build_grid(plan);
    std::vector<BucketProbs> buckets;
    buckets.reserve(grid.size());
    for (const ChannelPair& p : grid) buckets.push_back(bucket_probs(p, plan, src));
    const auto objective = [&](double mu) {
        SourceParams s = src;
        s.mu = mu;
        return total_wdm_rate(grid, buckets, s, link).k_total;
    };
    return optimize_mu(objective, mu_lo, mu_hi);
}

MuOptResult optimize_nowdm_mu(SourceParams src, const LinkParams& link, double mu_lo,
                              double mu_hi) {
    const auto objective = [&](double mu) {
        SourceParams s = src;
        s.mu = mu;
        return no_wdm_rate(s, link).key_rate;
    };
    return optimize_mu(objective, mu_lo, mu_hi);
}

double thermal_baseline_rate(const LinkParams& link, double mu_lo, double mu_hi) {
    SourceParams src;
    src.sigma_cr = 1.0;  // spectral shape does not enter the no-WDM rate
    src.tau_p = 1.0;
    src.stats = StatsKind::Thermal;
    return optimize_nowdm_mu(src, link, mu_lo, mu_hi).rate_star;
}

void SweepSpec::validate() const {
    if (grid.empty()) throw ConfigError("sweep.grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw ConfigError("sweep.grid must be strictly increasing");
    if (!(mu_lo > 0.0 && mu_hi > mu_lo))
        throw ConfigError("sweep mu bounds must satisfy 0 < lo < hi");
}

namespace {

void apply_axis(SweepAxis axis, double value, ChannelPlan& plan, SourceParams& src,
                LinkParams& link) {
    switch (axis) {
        case SweepAxis::TauP: src.tau_p = value; break;
        case SweepAxis::SigmaCr: src.sigma_cr = value; break;
        case SweepAxis::Transmittance: link.t_a = link.t_b = value; break;
        case SweepAxis::NPairs: plan.n_pairs = static_cast<int>(std::lround(value)); break;
        case SweepAxis::DeltaOmega:
        case SweepAxis::SigmaF: plan.width = value; break;
    }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs) {
    spec.validate();

    // one baseline per distinct link; only the transmittance axis changes it
    double shared_baseline = 0.0;
    if (spec.with_gain && spec.axis != SweepAxis::Transmittance)
        shared_baseline = thermal_baseline_rate(spec.link, spec.mu_lo, spec.mu_hi);

    std::vector<SweepRow> rows(spec.grid.size());
    detail::parallel_for(spec.grid.size(), jobs, [&](std::size_t i) {
        SweepRow& row = rows[i];
        row.axis_value = spec.grid[i];
        try {
            ChannelPlan plan = spec.plan;
            SourceParams src = spec.src;
            LinkParams link = spec.link;
            apply_axis(spec.axis, spec.grid[i], plan, src, link);
            if (spec.optimize_mu) {
                const MuOptResult opt = optimize_wdm_mu(plan, src, link, spec.mu_lo, spec.mu_hi);
                src.mu = opt.mu_star;
                row.mu_at_bound = opt.bracket_failure;
            }
            row.result = total_wdm_rate(plan, src, link);
            if (spec.with_gain) {
                const double base = (spec.axis == SweepAxis::Transmittance)
                                        ? thermal_baseline_rate(link, spec.mu_lo, spec.mu_hi)
                                        : shared_baseline;
                row.result.gain = gain(row.result.k_total, base);
            }
            if (spec.tau_rec > 0.0)
                row.result.r_per_second = time_rate(row.result.k_total, spec.tau_rec, src.tau_p);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace wdmqkd
