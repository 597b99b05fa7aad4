#pragma once

#include <limits>
#include <vector>

#include "wdmqkd/counting.hpp"

namespace wdmqkd {

double binary_entropy(double q);

struct Acceptance {
    double p_acc;
    double qber;
};

// p_acc = sum of the four single-click patterns; QBER counts the
// same-polarization coincidences (the source emits anti-correlated pairs).
Acceptance acceptance_and_qber(const ClickTable& table);

// Secret bits per source use: p_sift * p_acc * (1 - 2 h(Q)) with p_sift = 1/2,
// clamped at zero.
double secret_key_rate(double p_acc, double qber);

struct PairRate {
    int id;
    double p_acc;
    double qber;
    double key_rate;
};

struct KeyRateResult {
    std::vector<PairRate> per_pair;
    double k_total = 0.0;
    double mu_used = 0.0;
    double gain = std::numeric_limits<double>::quiet_NaN();
    double r_per_second = std::numeric_limits<double>::quiet_NaN();
};

KeyRateResult total_wdm_rate(const ChannelPlan& plan, const SourceParams& src,
                             const LinkParams& link);

// Tail target that keeps a click table's certified truncation bound below
// 1e-9 of its (loss- and power-suppressed) sum; what the engine itself uses.
double engine_tail_target(const SourceParams& src, const LinkParams& link);

// Same, with the spectral buckets precomputed (they do not depend on mu).
KeyRateResult total_wdm_rate(const std::vector<ChannelPair>& grid,
                             const std::vector<BucketProbs>& buckets, const SourceParams& src,
                             const LinkParams& link);

// Baseline without WDM modules.
struct NoWdmRate {
    double p_acc;
    double qber;
    double key_rate;
};
NoWdmRate no_wdm_rate(const SourceParams& src, const LinkParams& link);

// G = K_WDM_total / K_noWDM_thermal; the baseline must be the mu-optimized
// thermal no-WDM rate on the same link. Throws NumericalError for a zero
// baseline.
double gain(double k_wdm_total, double k_nowdm_thermal);

// Source repetition rate min{1/tau_rec, 1/(3 tau_p)} and bits per second.
double repetition_rate(double tau_rec, double tau_p);
double time_rate(double key_rate_per_use, double tau_rec, double tau_p);

}  // namespace wdmqkd
