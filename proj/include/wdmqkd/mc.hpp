#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "wdmqkd/counting.hpp"

namespace wdmqkd {

// Deterministic sampling stream; all draws are hand-rolled on top of the raw
// mt19937_64 output so results do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed_lo, std::uint64_t seed_hi = 0x9e3779b97f4a7c15ull);

    double uniform();                            // in (0, 1)
    std::pair<double, double> normal_pair();     // two independent N(0, 1)
    std::uint64_t draw_pair_count(const SourceParams& src,
                                  const std::vector<double>& multimode_means);

private:
    std::mt19937_64 eng_;
};

// One draw from |f|^2: u ~ N(0, sigma_cr/2), v ~ N(0, 1/tau_p),
// (omega_s, omega_i) = ((u+v)/2, (v-u)/2).
std::pair<double, double> sample_pair_spectrum(const SourceParams& src, Rng& rng);

struct McPairEstimate {
    int id = 0;
    // frequencies of the four accepted patterns, same labels as ClickTable
    double f_hh = 0.0, f_hv = 0.0, f_vh = 0.0, f_vv = 0.0;
    double se_hh = 0.0, se_hv = 0.0, se_vh = 0.0, se_vv = 0.0;
    std::uint64_t n_hh = 0, n_hv = 0, n_vh = 0, n_vv = 0;
    double qber = 0.0;  // empirical: same-polarization fraction of accepted events
    // bucket outcomes per emitted SPDC pair: both / signal only / idler only / neither
    std::array<std::uint64_t, 4> bucket_counts{};
};

struct McEstimate {
    std::vector<McPairEstimate> per_pair;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t pairs_emitted = 0;             // denominator for bucket_counts
    std::vector<std::uint64_t> hv_count_hist;    // HV pair number per pulse, last bin clamps
};

// Brute-force simulation of emission, spectral filtering, loss and PNR
// detection. Trials are split into fixed chunks with independent streams
// derived from (seed, chunk), so the result depends only on (inputs, seed,
// trials) and not on the worker count.
McEstimate simulate(const ChannelPlan& plan, const SourceParams& src, const LinkParams& link,
                    std::uint64_t trials, std::uint64_t seed, int jobs = 0);

}  // namespace wdmqkd
