#include "wdmqkd/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"
#include "wdmqkd/quad.hpp"

namespace wdmqkd {

using detail::normal_interval_prob;
using detail::normal_pdf;

void ChannelPlan::validate() const {
    if (n_pairs < 1) throw ConfigError("channels.n_pairs must be >= 1");
    if (!(omega_sep > 0.0)) throw ConfigError("channels.omega_sep must be > 0");
    if (!(width > 0.0)) throw ConfigError("channels.width must be > 0");
    // overlap guard; a single pair has no neighbor to overlap with
    if (profile == ProfileKind::Rect && n_pairs > 1 && width > omega_sep)
        throw ConfigError("channels.width (delta_omega) must not exceed omega_sep");
}

std::vector<ChannelPair> build_grid(const ChannelPlan& plan) {
    plan.validate();
    const int n = plan.n_pairs;
    std::vector<ChannelPair> grid;
    grid.reserve(static_cast<std::size_t>(n));
    const int first = -(n - 1);  // ids step by 2; parity follows N
    for (int i = 0; i < n; ++i) {
        const int id = first + 2 * i;
        const double half = 0.5 * double(id) * plan.omega_sep;
        ChannelPair p;
        p.id = id;
        p.omega_s0 = (plan.sign == CorrelationSign::Negative) ? -half : half;
        p.omega_i0 = half;
        grid.push_back(p);
    }
    return grid;
}

namespace {

struct RotatedFrame {
    double sigma_u;  // std of omega_s - omega_i
    double sigma_v;  // std of omega_s + omega_i
};

RotatedFrame frame_of(const SourceParams& src) {
    return {0.5 * src.sigma_cr, 1.0 / src.tau_p};
}

}  // namespace

BucketProbs bucket_probs_rect(const ChannelPair& pair, double delta_omega,
                              const SourceParams& src) {
    if (!(delta_omega > 0.0)) throw ConfigError("delta_omega must be > 0");
    src.validate();
    const RotatedFrame fr = frame_of(src);

    // dimensionless window edges: everything expressed relative to sigma_u /
    // sigma_v so that the grid rescaling transformation is exactly neutral
    const double s_lo = (pair.omega_s0 - 0.5 * delta_omega);
    const double s_hi = (pair.omega_s0 + 0.5 * delta_omega);
    const double i_lo = (pair.omega_i0 - 0.5 * delta_omega);
    const double i_hi = (pair.omega_i0 + 0.5 * delta_omega);

    // marginal of omega_s (and omega_i) is N(0, sigma_s)
    const double sigma_s = 0.5 * std::hypot(fr.sigma_u, fr.sigma_v);
    const double p_s = normal_interval_prob(s_lo / sigma_s, s_hi / sigma_s);
    const double p_i = normal_interval_prob(i_lo / sigma_s, i_hi / sigma_s);

    // joint probability over the rectangle, rotated to independent (u, v):
    //   u in [2*s_lo - v, 2*s_hi - v] ∩ [v - 2*i_hi, v - 2*i_lo]
    const double kappa = fr.sigma_v / fr.sigma_u;
    const double a1 = 2.0 * s_lo / fr.sigma_u, a2 = 2.0 * s_hi / fr.sigma_u;
    const double b1 = 2.0 * i_lo / fr.sigma_u, b2 = 2.0 * i_hi / fr.sigma_u;
    const auto integrand = [&](double zv) {
        const double hi = std::min(a2 - kappa * zv, kappa * zv - b1);
        const double lo = std::max(a1 - kappa * zv, kappa * zv - b2);
        return normal_pdf(zv) * normal_interval_prob(lo, hi);
    };

    // support in zv and the two kinks where the active window edge changes
    double z0 = 0.5 * (a1 + b1) / kappa;
    double z1 = 0.5 * (a2 + b2) / kappa;
    constexpr double z_cut = 40.0;
    z0 = std::max(z0, -z_cut);
    z1 = std::min(z1, z_cut);

    double p_pp = 0.0;
    if (z0 < z1) {
        // panel boundaries: window ends, the two kinks, and the dyadic
        // structure of the standard-normal weight so no panel dwarfs a feature
        std::vector<double> pts{z0, z1};
        for (double k : {0.5 * (a2 + b1) / kappa, 0.5 * (a1 + b2) / kappa})
            if (k > z0 && k < z1) pts.push_back(k);
        for (double s : {0.0, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0, -8.0, 16.0, -16.0, 32.0,
                         -32.0})
            if (s > z0 && s < z1) pts.push_back(s);

        double err_total = 0.0;
        p_pp = detail::integrate_panels(integrand, std::move(pts), 1e-11, err_total);
        // below ~1e-280 the probability is physically zero and relative
        // resolution is not meaningful
        if (p_pp > 1e-280 && err_total > 1e-9 * p_pp) {
            std::ostringstream msg;
            msg << "bucket_probs_rect: quadrature for channel pair " << pair.id
                << " not resolved to 1e-9 relative (error estimate " << err_total << ")";
            throw NumericalError(msg.str());
        }
    }

    BucketProbs b;
    b.p_pp = std::min(p_pp, std::min(p_s, p_i));
    b.p_pm = std::max(0.0, p_s - b.p_pp);
    b.p_mp = std::max(0.0, p_i - b.p_pp);
    b.p_mm = std::max(0.0, 1.0 - b.p_pp - b.p_pm - b.p_mp);
    return b;
}

BucketProbs bucket_probs_gauss(const ChannelPair& pair, double sigma_f,
                               const SourceParams& src) {
    if (!(sigma_f > 0.0)) throw ConfigError("sigma_f must be > 0");
    src.validate();
    const RotatedFrame fr = frame_of(src);

    const double ru = fr.sigma_u / sigma_f;
    const double rv = fr.sigma_v / sigma_f;
    const double u0 = (pair.omega_s0 - pair.omega_i0) / sigma_f;
    const double v0 = (pair.omega_s0 + pair.omega_i0) / sigma_f;

    // joint filter exp[-((ws-ws0)^2 + (wi-wi0)^2)/sigma_f^2] separates in (u, v)
    const double p_pp = std::exp(-0.5 * u0 * u0 / (1.0 + ru * ru) -
                                 0.5 * v0 * v0 / (1.0 + rv * rv)) /
                        (std::sqrt(1.0 + ru * ru) * std::sqrt(1.0 + rv * rv));

    // single-filter integrals over the N(0, sigma_s) marginals
    const double q = 0.5 * (ru * ru + rv * rv);  // 2*sigma_s^2/sigma_f^2
    const double cs = pair.omega_s0 / sigma_f;
    const double ci = pair.omega_i0 / sigma_f;
    const double p_s = std::exp(-cs * cs / (1.0 + q)) / std::sqrt(1.0 + q);
    const double p_i = std::exp(-ci * ci / (1.0 + q)) / std::sqrt(1.0 + q);

    BucketProbs b;
    b.p_pp = std::min(p_pp, std::min(p_s, p_i));
    b.p_pm = std::max(0.0, p_s - b.p_pp);
    b.p_mp = std::max(0.0, p_i - b.p_pp);
    b.p_mm = std::max(0.0, 1.0 - b.p_pp - b.p_pm - b.p_mp);
    return b;
}

BucketProbs bucket_probs(const ChannelPair& pair, const ChannelPlan& plan,
                         const SourceParams& src) {
    return plan.profile == ProfileKind::Rect ? bucket_probs_rect(pair, plan.width, src)
                                             : bucket_probs_gauss(pair, plan.width, src);
}

RescaledConfig rescale(const ChannelPlan& plan, const SourceParams& src, double factor) {
    if (!(factor > 0.0)) throw ConfigError("rescale factor must be > 0");
    RescaledConfig r{plan, src};
    r.plan.omega_sep *= factor;
    r.plan.width *= factor;
    r.src.sigma_cr *= factor;
    r.src.tau_p /= factor;
    return r;
}

}  // namespace wdmqkd
