#include "wdmqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"

namespace wdmqkd {

double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
}

Acceptance acceptance_and_qber(const ClickTable& table) {
    Acceptance a;
    a.p_acc = table.sum();
    a.qber = (a.p_acc > 0.0) ? (table.p_hh + table.p_vv) / a.p_acc : 0.0;
    return a;
}

double secret_key_rate(double p_acc, double qber) {
    constexpr double p_sift = 0.5;
    const double k = p_sift * p_acc * (1.0 - 2.0 * binary_entropy(qber));
    return std::max(0.0, k);
}

// Engine-wide truncation policy: the click-table bound must stay below 1e-9
// of the table sum, which itself scales with the loss and the source power;
// failed attempts retry with a tightened tail target.
double engine_tail_target(const SourceParams& src, const LinkParams& link) {
    const double loss = std::max(link.t_a * link.t_b, 1e-12);
    const double power = std::min(1.0, src.mu);
    return std::min(1e-10, 1e-12 * loss * power * power);
}

namespace {

// Tables are computed without the per-table check and certified in aggregate:
// the rate error is controlled by the summed truncation bounds relative to the
// summed table mass, which keeps far-off pairs with physically-zero tables
// from demanding impossible relative resolution. Retries tighten the tail.
template <typename TablesFn>
std::vector<ClickTable> tables_with_retry(const SourceParams& src, const LinkParams& link,
                                          const TablesFn& make_tables) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double target = engine_tail_target(src, link);
    for (int attempt = 0;; ++attempt) {
        const PairDistribution dist = auto_pair_distribution(src, target);
        std::vector<ClickTable> tables = make_tables(dist, kInf);
        double sum = 0.0, err = 0.0;
        for (const ClickTable& t : tables) {
            sum += t.sum();
            err += t.truncation_error;
        }
        if (sum < 1e-280 || err <= 1e-9 * sum) return tables;
        if (attempt >= 4)
            throw NumericalError("key rate truncation bound " + std::to_string(err) +
                                 " not certified below 1e-9 of the table mass " +
                                 std::to_string(sum));
        target *= 1e-6;
    }
}

KeyRateResult rate_with_distribution(const std::vector<ChannelPair>& grid,
                                     const std::vector<BucketProbs>& buckets,
                                     const SourceParams& src, const LinkParams& link) {
    src.validate();
    link.validate();

    const auto tables = tables_with_retry(
        src, link, [&](const PairDistribution& d, double tol) {
            std::vector<ClickTable> out;
            out.reserve(grid.size());
            for (const BucketProbs& b : buckets) out.push_back(click_table(b, d, d, link, tol));
            return out;
        });
    KeyRateResult res;
    res.mu_used = src.mu;
    res.per_pair.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Acceptance a = acceptance_and_qber(tables[i]);
        res.per_pair.push_back({grid[i].id, a.p_acc, a.qber, secret_key_rate(a.p_acc, a.qber)});
    }
    std::sort(res.per_pair.begin(), res.per_pair.end(),
              [](const PairRate& x, const PairRate& y) { return x.id < y.id; });
    double total = 0.0;
    for (const PairRate& p : res.per_pair) total += p.key_rate;
    res.k_total = total;
    return res;
}

}  // namespace

KeyRateResult total_wdm_rate(const std::vector<ChannelPair>& grid,
                             const std::vector<BucketProbs>& buckets, const SourceParams& src,
                             const LinkParams& link) {
    return rate_with_distribution(grid, buckets, src, link);
}

KeyRateResult total_wdm_rate(const ChannelPlan& plan, const SourceParams& src,
                             const LinkParams& link) {
    const auto grid = build_grid(plan);
    std::vector<BucketProbs> buckets;
    buckets.reserve(grid.size());
    for (const ChannelPair& p : grid) buckets.push_back(bucket_probs(p, plan, src));
    return rate_with_distribution(grid, buckets, src, link);
}

NoWdmRate no_wdm_rate(const SourceParams& src, const LinkParams& link) {
    src.validate();
    link.validate();
    const auto tables =
        tables_with_retry(src, link, [&](const PairDistribution& d, double tol) {
            return std::vector<ClickTable>{click_table_nowdm(d, d, link, tol)};
        });
    const Acceptance a = acceptance_and_qber(tables[0]);
    return {a.p_acc, a.qber, secret_key_rate(a.p_acc, a.qber)};
}

double gain(double k_wdm_total, double k_nowdm_thermal) {
    if (!(k_nowdm_thermal > 0.0))
        throw NumericalError("gain: baseline no-WDM thermal key rate is zero");
    return k_wdm_total / k_nowdm_thermal;
}

double repetition_rate(double tau_rec, double tau_p) {
    if (!(tau_rec > 0.0)) throw ConfigError("tau_rec must be > 0");
    if (!(tau_p > 0.0)) throw ConfigError("tau_p must be > 0");
    return std::min(1.0 / tau_rec, 1.0 / (3.0 * tau_p));
}

double time_rate(double key_rate_per_use, double tau_rec, double tau_p) {
    return repetition_rate(tau_rec, tau_p) * key_rate_per_use;
}

}  // namespace wdmqkd
