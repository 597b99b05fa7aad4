#include "wdmqkd/mc.hpp"

#include <algorithm>
#include <cmath>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/parallel.hpp"

namespace wdmqkd {

namespace {

constexpr std::uint64_t kChunk = 1u << 20;
constexpr std::size_t kHistBins = 64;

std::uint64_t sample_poisson(Rng& rng, double mean);

}  // namespace

Rng::Rng(std::uint64_t seed_lo, std::uint64_t seed_hi) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_lo), static_cast<std::uint32_t>(seed_lo >> 32),
                      static_cast<std::uint32_t>(seed_hi), static_cast<std::uint32_t>(seed_hi >> 32)};
    eng_.seed(seq);
}

double Rng::uniform() {
    return (double(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

std::pair<double, double> Rng::normal_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * detail::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

std::uint64_t Rng::draw_pair_count(const SourceParams& src,
                                   const std::vector<double>& multimode_means) {
    switch (src.stats) {
        case StatsKind::Thermal: {
            if (src.mu == 0.0) return 0;
            // geometric with P(k) = theta^k (1-theta), theta = mu/(1+mu)
            const double ltheta = std::log(src.mu / (1.0 + src.mu));
            return static_cast<std::uint64_t>(std::log(uniform()) / ltheta);
        }
        case StatsKind::Poisson:
            return sample_poisson(*this, src.mu);
        case StatsKind::Multimode: {
            std::uint64_t total = 0;
            for (double mean : multimode_means) {
                if (mean == 0.0) continue;
                const double ltheta = std::log(mean / (1.0 + mean));
                total += static_cast<std::uint64_t>(std::log(uniform()) / ltheta);
            }
            return total;
        }
    }
    return 0;
}

std::pair<double, double> sample_pair_spectrum(const SourceParams& src, Rng& rng) {
    const auto [z1, z2] = rng.normal_pair();
    const double u = z1 * 0.5 * src.sigma_cr;
    const double v = z2 / src.tau_p;
    return {0.5 * (u + v), 0.5 * (v - u)};
}

namespace {

// Knuth's product-of-uniforms method; exact, split for large means so the
// exp(-mean) threshold never underflows.
std::uint64_t sample_poisson(Rng& rng, double mean) {
    if (mean == 0.0) return 0;
    std::uint64_t total = 0;
    while (mean > 80.0) {
        total += sample_poisson(rng, 40.0);
        mean -= 40.0;
    }
    const double limit = std::exp(-mean);
    double prod = 1.0;
    std::uint64_t k = 0;
    for (;;) {
        prod *= rng.uniform();
        if (prod <= limit) return total + k;
        ++k;
    }
}

struct PairTally {
    std::uint64_t n_hh = 0, n_hv = 0, n_vh = 0, n_vv = 0;
    std::array<std::uint64_t, 4> buckets{};

    void merge(const PairTally& o) {
        n_hh += o.n_hh;
        n_hv += o.n_hv;
        n_vh += o.n_vh;
        n_vv += o.n_vv;
        for (std::size_t i = 0; i < 4; ++i) buckets[i] += o.buckets[i];
    }
};

struct ChunkTally {
    std::vector<PairTally> pairs;
    std::array<std::uint64_t, kHistBins> hist{};
    std::uint64_t pairs_emitted = 0;

    explicit ChunkTally(std::size_t n) : pairs(n) {}

    void merge(const ChunkTally& o) {
        for (std::size_t i = 0; i < pairs.size(); ++i) pairs[i].merge(o.pairs[i]);
        for (std::size_t i = 0; i < kHistBins; ++i) hist[i] += o.hist[i];
        pairs_emitted += o.pairs_emitted;
    }
};

struct Counts {
    std::uint16_t i_h = 0, i_v = 0, j_h = 0, j_v = 0;
};

void run_chunk(const ChannelPlan& plan, const std::vector<ChannelPair>& grid,
               const SourceParams& src, const LinkParams& link,
               const std::vector<double>& mm_means, std::uint64_t seed, std::uint64_t chunk_idx,
               std::uint64_t n_trials, ChunkTally& tally) {
    Rng rng(seed, 0x9e3779b97f4a7c15ull ^ (chunk_idx * 0xbf58476d1ce4e5b9ull));
    const std::size_t n_ch = grid.size();
    const bool rect = plan.profile == ProfileKind::Rect;
    const double half_width = 0.5 * plan.width;
    const double inv_sf2 = rect ? 0.0 : 1.0 / (plan.width * plan.width);

    std::vector<Counts> counts(n_ch);

    for (std::uint64_t t = 0; t < n_trials; ++t) {
        const std::uint64_t m = rng.draw_pair_count(src, mm_means);
        const std::uint64_t n = rng.draw_pair_count(src, mm_means);
        tally.hist[std::min<std::uint64_t>(m, kHistBins - 1)]++;
        tally.pairs_emitted += m + n;
        if (m + n == 0) continue;

        std::fill(counts.begin(), counts.end(), Counts{});
        for (std::uint64_t p = 0; p < m + n; ++p) {
            const bool is_hv = p < m;  // first m draws are HV pairs
            const auto [omega_s, omega_i] = sample_pair_spectrum(src, rng);
            for (std::size_t c = 0; c < n_ch; ++c) {
                bool sig_in, idl_in;
                if (rect) {
                    sig_in = std::abs(omega_s - grid[c].omega_s0) <= half_width;
                    idl_in = std::abs(omega_i - grid[c].omega_i0) <= half_width;
                } else {
                    const double ds = omega_s - grid[c].omega_s0;
                    const double di = omega_i - grid[c].omega_i0;
                    sig_in = rng.uniform() < std::exp(-ds * ds * inv_sf2);
                    idl_in = rng.uniform() < std::exp(-di * di * inv_sf2);
                }
                tally.pairs[c].buckets[sig_in ? (idl_in ? 0u : 1u) : (idl_in ? 2u : 3u)]++;
                if (sig_in && rng.uniform() < link.t_a) {
                    if (is_hv)
                        counts[c].i_h++;
                    else
                        counts[c].i_v++;
                }
                if (idl_in && rng.uniform() < link.t_b) {
                    if (is_hv)
                        counts[c].j_v++;
                    else
                        counts[c].j_h++;
                }
            }
        }
        for (std::size_t c = 0; c < n_ch; ++c) {
            const Counts& k = counts[c];
            if (k.i_h + k.i_v != 1 || k.j_h + k.j_v != 1) continue;
            if (k.i_h == 1) {
                if (k.j_h == 1)
                    tally.pairs[c].n_hh++;
                else
                    tally.pairs[c].n_hv++;
            } else {
                if (k.j_h == 1)
                    tally.pairs[c].n_vh++;
                else
                    tally.pairs[c].n_vv++;
            }
        }
    }
}

}  // namespace

McEstimate simulate(const ChannelPlan& plan, const SourceParams& src, const LinkParams& link,
                    std::uint64_t trials, std::uint64_t seed, int jobs) {
    plan.validate();
    src.validate();
    link.validate();
    if (trials < 1) throw ConfigError("mc.trials must be >= 1");

    const auto grid = build_grid(plan);
    std::vector<double> mm_means;
    if (src.stats == StatsKind::Multimode) {
        for (double l : mode_strengths(src, src.modes)) {
            const double mean = src.mu * l;
            if (mean < 1e-16) break;  // beyond MC resolution at any feasible trial count
            mm_means.push_back(mean);
        }
    }

    const std::uint64_t n_chunks = (trials + kChunk - 1) / kChunk;
    std::vector<ChunkTally> partial(static_cast<std::size_t>(n_chunks), ChunkTally(grid.size()));
    detail::parallel_for(static_cast<std::size_t>(n_chunks), jobs, [&](std::size_t i) {
        const std::uint64_t begin = std::uint64_t(i) * kChunk;
        const std::uint64_t len = std::min<std::uint64_t>(kChunk, trials - begin);
        run_chunk(plan, grid, src, link, mm_means, seed, std::uint64_t(i), len, partial[i]);
    });

    ChunkTally total(grid.size());
    for (const ChunkTally& part : partial) total.merge(part);

    McEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.pairs_emitted = total.pairs_emitted;
    est.hv_count_hist.assign(total.hist.begin(), total.hist.end());
    est.per_pair.reserve(grid.size());
    const double inv_n = 1.0 / double(trials);
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const PairTally& t = total.pairs[c];
        McPairEstimate e;
        e.id = grid[c].id;
        e.n_hh = t.n_hh;
        e.n_hv = t.n_hv;
        e.n_vh = t.n_vh;
        e.n_vv = t.n_vv;
        e.f_hh = double(t.n_hh) * inv_n;
        e.f_hv = double(t.n_hv) * inv_n;
        e.f_vh = double(t.n_vh) * inv_n;
        e.f_vv = double(t.n_vv) * inv_n;
        const auto se = [&](double f) { return std::sqrt(f * (1.0 - f) * inv_n); };
        e.se_hh = se(e.f_hh);
        e.se_hv = se(e.f_hv);
        e.se_vh = se(e.f_vh);
        e.se_vv = se(e.f_vv);
        const std::uint64_t accepted = t.n_hh + t.n_hv + t.n_vh + t.n_vv;
        e.qber = accepted ? double(t.n_hh + t.n_vv) / double(accepted) : 0.0;
        e.bucket_counts = t.buckets;
        est.per_pair.push_back(e);
    }
    return est;
}

}  // namespace wdmqkd
