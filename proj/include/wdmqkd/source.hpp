#pragma once

#include <vector>

namespace wdmqkd {

enum class StatsKind { Thermal, Poisson, Multimode };

// Pulsed SPDC source description: EPMF width sigma_cr [rad/s], pump pulse
// duration tau_p [s], mean pair number mu per polarization mode per pulse.
struct SourceParams {
    double sigma_cr = 0.0;
    double tau_p = 0.0;
    double mu = 0.0;
    StatsKind stats = StatsKind::Poisson;
    int modes = 1;  // mode cutoff M, Multimode only

    void validate() const;  // throws ConfigError
};

struct DerivedSpectral {
    double sigma;  // photon spectral bandwidth [rad/s]
    double rho;    // spectral correlation coefficient, in [-1, 1]
};

// Truncated photon-pair number distribution pi(0..k_max) together with a
// rigorous upper bound on the mass beyond k_max.
struct PairDistribution {
    std::vector<double> probs;
    double tail_bound = 0.0;

    int k_max() const { return static_cast<int>(probs.size()) - 1; }
    double mean() const;
};

// |f(omega_s, omega_i)|^2 of the two-parameter Gaussian biphoton spectrum;
// omега arguments are detunings from the central frequencies [rad/s].
double biphoton_density(double omega_s, double omega_i, const SourceParams& src);

DerivedSpectral derived_params(const SourceParams& src);

// Relative Schmidt-mode strengths lambda_0..lambda_{m_count-1}; a geometric
// sequence in m that sums to 1 over all modes.
std::vector<double> mode_strengths(const SourceParams& src, int m_count);

// Smallest k_max whose certified tail bound is below tail_tol.
int auto_k_max(const SourceParams& src, double tail_tol);

// Throws NumericalError when k_max leaves more than max_tail of the mass
// uncovered.
PairDistribution pair_distribution(const SourceParams& src, int k_max,
                                   double max_tail = 1e-9);

// Convenience: distribution truncated at auto_k_max(src, tail_tol). Builds the
// multimode convolution once instead of twice.
PairDistribution auto_pair_distribution(const SourceParams& src, double tail_tol);

}  // namespace wdmqkd
