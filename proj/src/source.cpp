#include "wdmqkd/source.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"

namespace wdmqkd {

using detail::pi;

void SourceParams::validate() const {
    if (!(sigma_cr > 0.0)) throw ConfigError("source.sigma_cr must be > 0");
    if (!(tau_p > 0.0)) throw ConfigError("source.tau_p must be > 0");
    if (!(mu >= 0.0)) throw ConfigError("source.mu must be >= 0");
    if (stats == StatsKind::Multimode && modes < 1)
        throw ConfigError("source.modes must be >= 1 for multimode statistics");
}

double PairDistribution::mean() const {
    double m = 0.0;
    for (std::size_t k = 1; k < probs.size(); ++k) m += double(k) * probs[k];
    return m;
}

double biphoton_density(double omega_s, double omega_i, const SourceParams& src) {
    const double u = omega_s - omega_i;
    const double v = omega_s + omega_i;
    const double norm = 2.0 * src.tau_p / (pi * src.sigma_cr);
    return norm * std::exp(-2.0 * u * u / (src.sigma_cr * src.sigma_cr) -
                           0.5 * v * v * src.tau_p * src.tau_p);
}

DerivedSpectral derived_params(const SourceParams& src) {
    const double st = src.sigma_cr * src.tau_p;
    DerivedSpectral d;
    d.sigma = std::sqrt(4.0 + st * st) / (2.0 * detail::sqrt2 * src.tau_p);
    d.rho = (4.0 - st * st) / (4.0 + st * st);
    return d;
}

std::vector<double> mode_strengths(const SourceParams& src, int m_count) {
    if (m_count < 1) throw ConfigError("mode count must be >= 1");
    const double st = src.sigma_cr * src.tau_p;
    const double lambda0 = 8.0 * st / ((2.0 + st) * (2.0 + st));
    const double ratio = ((2.0 - st) / (2.0 + st)) * ((2.0 - st) / (2.0 + st));
    std::vector<double> lam(static_cast<std::size_t>(m_count));
    double l = lambda0;
    for (int m = 0; m < m_count; ++m) {
        lam[static_cast<std::size_t>(m)] = l;
        l *= ratio;
    }
    return lam;
}

namespace {

// pi(k) = theta^k (1 - theta) with theta = mean/(1 + mean).
std::vector<double> thermal_probs(double mean, int k_max) {
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
    const double theta = mean / (1.0 + mean);
    double term = 1.0 / (1.0 + mean);
    for (int k = 0; k <= k_max; ++k) {
        p[static_cast<std::size_t>(k)] = term;
        term *= theta;
    }
    return p;
}

std::vector<double> poisson_probs(double mean, int k_max) {
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
    if (mean == 0.0) {
        p[0] = 1.0;
        return p;
    }
    // log-space per term; direct recursion underflows at pi(0) for large mu
    const double lmu = std::log(mean);
    for (int k = 0; k <= k_max; ++k) {
        const double lg = double(k) * lmu - mean - std::lgamma(double(k) + 1.0);
        p[static_cast<std::size_t>(k)] = (lg < -745.0) ? 0.0 : std::exp(lg);
    }
    return p;
}

// exact geometric tail theta^(K+1)
double thermal_tail(double mean, int k_max) {
    const double theta = mean / (1.0 + mean);
    return std::exp(double(k_max + 1) * std::log(theta));
}

// partial series plus a geometric-domination remainder; accurate to FP, always
// an upper bound
double poisson_tail(double mean, int k_max) {
    const double lmu = std::log(mean);
    const int k0 = k_max + 1;
    double lterm = double(k0) * lmu - mean - std::lgamma(double(k0) + 1.0);
    double term = (lterm < -745.0) ? 0.0 : std::exp(lterm);
    double acc = 0.0;
    int k = k0;
    while (term > 0.0) {
        acc += term;
        ++k;
        term *= mean / double(k);
        const double r = mean / double(k + 1);
        if (r < 1.0 && term < 1e-16 * acc) {
            acc += term / (1.0 - r);
            return acc;
        }
    }
    return acc;
}

struct BuiltMultimode {
    std::vector<double> probs;
    double discarded;  // rigorous bound on the mass lost to all truncations
};

// Convolution of per-mode thermal distributions with means mu*lambda_m.
// Each factor is truncated at its own tail below mode_cut (1e-14 by default,
// tighter when the caller needs a tighter total bound); modes too weak to
// matter contribute their exact zero-pair probability as a scalar factor.
// Every dropped contribution is accumulated into `discarded`, so the result
// is a pointwise lower bound with a certified total deficit.
BuiltMultimode multimode_probs(const SourceParams& src, int cap_hint, double total_cut) {
    const auto lam = mode_strengths(src, src.modes);
    const double mode_cut = std::min(1e-14, 0.25 * total_cut / double(std::max(1, src.modes)));
    BuiltMultimode built{{1.0}, 0.0};
    std::vector<double>& dist = built.probs;
    double zero_scale = 1.0;
    const int cap = std::max(cap_hint, 16);
    for (double l : lam) {
        const double mean = src.mu * l;
        const double theta = mean / (1.0 + mean);
        if (theta < 0.25 * mode_cut) {
            zero_scale *= 1.0 / (1.0 + mean);
            built.discarded += theta;  // P(k >= 1) for this mode
            continue;
        }
        int km = std::max(0, static_cast<int>(std::ceil(std::log(mode_cut) / std::log(theta))) - 1);
        km = std::min(km, cap);
        std::vector<double> g(static_cast<std::size_t>(km) + 1);
        double term = 1.0 / (1.0 + mean);
        for (int k = 0; k <= km; ++k) {
            g[static_cast<std::size_t>(k)] = term;
            term *= theta;
        }
        built.discarded += std::exp(double(km + 1) * std::log(theta));  // mode tail
        const std::size_t out_len =
            std::min<std::size_t>(dist.size() + g.size() - 1, static_cast<std::size_t>(cap) + 1);
        std::vector<double> out(out_len, 0.0);
        // suffix sums of g pick up whatever the length cap drops
        std::vector<double> gsuf(g.size() + 1, 0.0);
        for (std::size_t j = g.size(); j-- > 0;) gsuf[j] = gsuf[j + 1] + g[j];
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i] == 0.0) continue;
            const std::size_t jmax = std::min(g.size(), out_len > i ? out_len - i : 0);
            for (std::size_t j = 0; j < jmax; ++j) out[i + j] += dist[i] * g[j];
            if (jmax < g.size()) built.discarded += dist[i] * gsuf[jmax];
        }
        while (out.size() > 1 && out.back() < 1e-320) {
            built.discarded += out.back();
            out.pop_back();
        }
        dist = std::move(out);
    }
    if (zero_scale != 1.0)
        for (double& x : dist) x *= zero_scale;
    return built;
}

}  // namespace

int auto_k_max(const SourceParams& src, double tail_tol) {
    src.validate();
    if (src.mu == 0.0) return 0;
    switch (src.stats) {
        case StatsKind::Thermal: {
            const double theta = src.mu / (1.0 + src.mu);
            // tail(K) = theta^{K+1}
            const int k = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(theta))) - 1;
            return std::max(0, k);
        }
        case StatsKind::Poisson: {
            // geometric domination: tail(K) <= pi(K+1) / (1 - mu/(K+2))
            const double lmu = std::log(src.mu);
            for (int k = std::max(0, static_cast<int>(src.mu));; ++k) {
                if (double(k + 2) <= src.mu) continue;
                const double lp = double(k + 1) * lmu - src.mu - std::lgamma(double(k) + 2.0);
                const double bound = std::exp(lp) / (1.0 - src.mu / double(k + 2));
                if (bound < tail_tol) return k;
            }
        }
        case StatsKind::Multimode: {
            return auto_pair_distribution(src, tail_tol).k_max();
        }
    }
    return 0;
}

PairDistribution auto_pair_distribution(const SourceParams& src, double tail_tol) {
    src.validate();
    if (src.mu == 0.0) return PairDistribution{{1.0}, 0.0};
    if (src.stats != StatsKind::Multimode)
        return pair_distribution(src, auto_k_max(src, tail_tol), tail_tol);
    PairDistribution d;
    BuiltMultimode built = multimode_probs(src, 1 << 22, tail_tol);
    d.probs = std::move(built.probs);
    double suffix = built.discarded;
    while (d.probs.size() > 1 && suffix + d.probs.back() <= tail_tol) {
        suffix += d.probs.back();
        d.probs.pop_back();
    }
    d.tail_bound = suffix;
    if (d.tail_bound > tail_tol)
        throw NumericalError("auto_pair_distribution: multimode tail bound " +
                             std::to_string(d.tail_bound) + " exceeds requested tolerance");
    return d;
}

PairDistribution pair_distribution(const SourceParams& src, int k_max, double max_tail) {
    src.validate();
    if (k_max < 0) throw ConfigError("k_max must be >= 0");
    PairDistribution d;
    if (src.mu == 0.0) {
        d.probs.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
        d.probs[0] = 1.0;
        d.tail_bound = 0.0;
        return d;
    }
    switch (src.stats) {
        case StatsKind::Thermal:
            d.probs = thermal_probs(src.mu, k_max);
            d.tail_bound = thermal_tail(src.mu, k_max);
            break;
        case StatsKind::Poisson:
            d.probs = poisson_probs(src.mu, k_max);
            d.tail_bound = poisson_tail(src.mu, k_max);
            break;
        case StatsKind::Multimode: {
            BuiltMultimode built = multimode_probs(src, k_max, max_tail);
            d.probs = std::move(built.probs);
            double tail = built.discarded;
            while (static_cast<int>(d.probs.size()) - 1 > k_max) {
                tail += d.probs.back();
                d.probs.pop_back();
            }
            d.probs.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
            d.tail_bound = tail;
            break;
        }
    }
    if (d.tail_bound > max_tail) {
        std::ostringstream msg;
        msg << "pair_distribution: k_max=" << k_max << " leaves tail bound " << d.tail_bound
            << " > " << max_tail << " (insufficient truncation)";
        throw NumericalError(msg.str());
    }
    return d;
}

}  // namespace wdmqkd
