#pragma once

#include <vector>

#include "wdmqkd/source.hpp"

namespace wdmqkd {

enum class CorrelationSign { Negative, Positive };
enum class ProfileKind { Rect, Gauss };

// WDM grid description: N channel pairs around the spectral center, separated
// by omega_sep, each with a rectangular (width = delta_omega) or Gaussian
// (width = sigma_f) transmission profile.
struct ChannelPlan {
    int n_pairs = 1;
    CorrelationSign sign = CorrelationSign::Negative;
    double omega_sep = 0.0;  // rad/s
    ProfileKind profile = ProfileKind::Rect;
    double width = 0.0;  // rad/s; delta_omega for Rect, sigma_f for Gauss

    void validate() const;  // throws ConfigError
};

struct ChannelPair {
    int id;            // grid identification number n
    double omega_s0;   // signal channel center detuning [rad/s]
    double omega_i0;   // idler channel center detuning [rad/s]
};

// Per channel pair: probabilities that both photons of an SPDC pair enter the
// pair's channels / only the signal / only the idler / neither.
struct BucketProbs {
    double p_pp = 0.0;
    double p_pm = 0.0;
    double p_mp = 0.0;
    double p_mm = 0.0;

    double sum() const { return p_pp + p_pm + p_mp + p_mm; }
};

// N pairs sorted by id; odd N uses even ids in [-(N-1), N-1], even N uses odd
// ids in [-(N-1), N-1].
std::vector<ChannelPair> build_grid(const ChannelPlan& plan);

BucketProbs bucket_probs_rect(const ChannelPair& pair, double delta_omega,
                              const SourceParams& src);
BucketProbs bucket_probs_gauss(const ChannelPair& pair, double sigma_f,
                               const SourceParams& src);
BucketProbs bucket_probs(const ChannelPair& pair, const ChannelPlan& plan,
                         const SourceParams& src);

struct RescaledConfig {
    ChannelPlan plan;
    SourceParams src;
};

// Frequency-axis rescaling that leaves every BucketProbs invariant:
// omega_sep, width, sigma_cr -> factor * (...), tau_p -> tau_p / factor.
RescaledConfig rescale(const ChannelPlan& plan, const SourceParams& src, double factor);

}  // namespace wdmqkd
