#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wdmqkd/keyrate.hpp"

namespace wdmqkd {

struct MuOptResult {
    double mu_star = 0.0;
    double rate_star = 0.0;
    bool bracket_failure = false;  // maximum sat at a search bound
    int evaluations = 0;
};

inline constexpr double kDefaultMuLo = 1e-6;
inline constexpr double kDefaultMuHi = 1e3;

// Maximizes objective(mu) over [mu_lo, mu_hi] by golden-section search on
// log(mu) after a coarse unimodality pre-scan; falls back to a dense grid
// (64 points per decade) when the pre-scan is not unimodal. The returned rate
// never falls below any value seen during the search.
MuOptResult optimize_mu(const std::function<double(double)>& objective,
                        double mu_lo = kDefaultMuLo, double mu_hi = kDefaultMuHi,
                        double mu_rel_tol = 1e-4);

MuOptResult optimize_wdm_mu(const ChannelPlan& plan, SourceParams src, const LinkParams& link,
                            double mu_lo = kDefaultMuLo, double mu_hi = kDefaultMuHi);
MuOptResult optimize_nowdm_mu(SourceParams src, const LinkParams& link,
                              double mu_lo = kDefaultMuLo, double mu_hi = kDefaultMuHi);

// mu-optimized thermal no-WDM rate used as the gain baseline; sigma_cr/tau_p
// are irrelevant for it, only the link enters.
double thermal_baseline_rate(const LinkParams& link, double mu_lo = kDefaultMuLo,
                             double mu_hi = kDefaultMuHi);

enum class SweepAxis { TauP, SigmaCr, Transmittance, NPairs, DeltaOmega, SigmaF };

struct SweepSpec {
    SweepAxis axis = SweepAxis::TauP;
    std::vector<double> grid;  // strictly increasing
    ChannelPlan plan;          // fixed configuration; the axis field is overridden
    SourceParams src;
    LinkParams link;
    bool optimize_mu = true;
    double mu_lo = kDefaultMuLo;
    double mu_hi = kDefaultMuHi;
    bool with_gain = true;
    double tau_rec = 0.0;  // when > 0, rows carry R = f_r * K

    void validate() const;
};

struct SweepRow {
    double axis_value = 0.0;
    KeyRateResult result;
    bool mu_at_bound = false;
    bool ok = true;
    std::string error;
};

// One row per grid value, computed independently by a bounded worker pool;
// identical sweep descriptions produce identical tables.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 0);

}  // namespace wdmqkd
