#include "wdmqkd/counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wdmqkd/errors.hpp"
#include "wdmqkd/math_util.hpp"

namespace wdmqkd {

void LinkParams::validate() const {
    if (!(t_a >= 0.0 && t_a <= 1.0)) throw ConfigError("link.t_a must be in [0, 1]");
    if (!(t_b >= 0.0 && t_b <= 1.0)) throw ConfigError("link.t_b must be in [0, 1]");
}

namespace {

double lgbinom(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// ln(p^e) with the 0^0 = 1 convention; -inf marks a vanishing term.
double lgpow(double p, int e) {
    if (e == 0) return 0.0;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return double(e) * std::log(p);
}

// Moments of the truncated distribution against powers of z:
//   s0 = sum pi(k) z^k, s1 = sum pi(k) k z^(k-1), s2 = sum pi(k) k(k-1) z^(k-2).
struct PgfMoments {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
};

PgfMoments pgf_moments(const std::vector<double>& probs, double z) {
    PgfMoments m;
    const int kmax = static_cast<int>(probs.size()) - 1;
    double zpow = 1.0;  // z^(k-2) once k >= 2
    for (int k = 0; k <= kmax; ++k) {
        const double p = probs[static_cast<std::size_t>(k)];
        if (k == 0) {
            m.s0 += p;
        } else if (k == 1) {
            m.s0 += p * z;
            m.s1 += p;
        } else {
            m.s2 += p * double(k) * double(k - 1) * zpow;
            m.s1 += p * double(k) * zpow * z;
            m.s0 += p * zpow * z * z;
            zpow *= z;
            if (zpow < 1e-320 && zpow != 0.0) {
                // remaining terms are below double resolution
                break;
            }
        }
    }
    return m;
}

// sup over integer k > kmax of k z^(k-1) (z in [0,1)).
double sup_k_z(double z, int kmax) {
    if (z <= 0.0) return (kmax < 1) ? 1.0 : 0.0;
    if (z >= 1.0) return std::numeric_limits<double>::infinity();
    const double kc = -1.0 / std::log(z);
    const double k = std::max(double(kmax + 1), kc);
    return k * std::exp((k - 1.0) * std::log(z));
}

// sup over integer k > kmax of k(k-1) z^(k-2), bounded by k^2 z^(k-2).
double sup_kk_z(double z, int kmax) {
    if (z <= 0.0) return (kmax < 2) ? 2.0 : 0.0;
    if (z >= 1.0) return std::numeric_limits<double>::infinity();
    const double kc = -2.0 / std::log(z);
    const double k = std::max(double(kmax + 1), kc);
    return k * k * std::exp((k - 2.0) * std::log(z));
}

// One side of the factorized pattern probabilities: the contribution of one
// pair family (HV or VH) to single-click events, together with a certified
// bound on what the truncated distribution leaves out.
struct SideSums {
    double s00, s10, s01, s11;
    double e00, e10, e01, e11;
};

SideSums side_sums(const PairDistribution& pi, const BucketProbs& b, double t_near,
                   double t_far) {
    // per emitted pair, probability of contributing no surviving photon at all
    const double g00 = b.p_pp * (1.0 - t_near) * (1.0 - t_far) + b.p_pm * (1.0 - t_near) +
                       b.p_mp * (1.0 - t_far) + b.p_mm;
    // exactly one survivor on the near (Alice) or far (Bob) side
    const double g10 = t_near * (b.p_pp * (1.0 - t_far) + b.p_pm);
    const double g01 = t_far * (b.p_pp * (1.0 - t_near) + b.p_mp);
    const double g11 = b.p_pp * t_near * t_far;  // both survivors from one pair

    const PgfMoments m = pgf_moments(pi.probs, g00);
    SideSums s;
    s.s00 = m.s0;
    s.s10 = g10 * m.s1;
    s.s01 = g01 * m.s1;
    s.s11 = g11 * m.s1 + g10 * g01 * m.s2;

    // every per-k summand is itself a conditional probability, so the tail
    // contribution never exceeds the bare tail mass
    const int kmax = pi.k_max();
    const double tail = pi.tail_bound;
    const double sup1 = (g10 > 0.0 || g01 > 0.0 || g11 > 0.0) ? sup_k_z(g00, kmax) : 0.0;
    const double sup2 = (g10 * g01 > 0.0) ? sup_kk_z(g00, kmax) : 0.0;
    s.e00 = tail * ((g00 >= 1.0) ? 1.0 : std::pow(g00, double(kmax + 1)));
    s.e10 = (g10 > 0.0) ? tail * std::min(1.0, g10 * sup1) : 0.0;
    s.e01 = (g01 > 0.0) ? tail * std::min(1.0, g01 * sup1) : 0.0;
    s.e11 = tail * std::min(1.0, (g11 > 0.0 ? g11 * sup1 : 0.0) +
                                     (g10 * g01 > 0.0 ? g10 * g01 * sup2 : 0.0));
    return s;
}

double pattern_error(double sa, double ea, double sb, double eb) {
    return ea * sb + eb * sa + ea * eb;
}

void check_truncation(ClickTable& t, double rel_tol, const char* where) {
    // relative resolution has no meaning once the table is physically zero
    if (t.sum() < 1e-280) return;
    const double budget = rel_tol * t.sum();
    if (t.truncation_error > budget && t.truncation_error > 1e-300) {
        std::ostringstream msg;
        msg << where << ": certified truncation error " << t.truncation_error
            << " exceeds tolerance " << budget << " (table sum " << t.sum() << ")";
        throw NumericalError(msg.str());
    }
}

}  // namespace

double joint_entry_prob(int m_h, int m_v, int n_h, int n_v, const BucketProbs& buckets,
                        const PairDistribution& pi_hv, const PairDistribution& pi_vh) {
    if (m_h < 0 || m_v < 0 || n_h < 0 || n_v < 0)
        throw ConfigError("joint_entry_prob: photon counts must be >= 0");
    const int k1_max = pi_hv.k_max();
    const int k2_max = pi_vh.k_max();

    double total = 0.0;
    for (int alpha = 0; alpha <= std::min(m_h, n_v); ++alpha) {
        for (int beta = 0; beta <= std::min(m_v, n_h); ++beta) {
            const int e_pm = m_h + m_v - alpha - beta;
            const int e_mp = n_h + n_v - alpha - beta;
            const double lg_ab = lgpow(buckets.p_pp, alpha + beta) + lgpow(buckets.p_pm, e_pm) +
                                 lgpow(buckets.p_mp, e_mp);
            if (lg_ab == -std::numeric_limits<double>::infinity()) continue;
            for (int gamma = 0; m_h + n_v + gamma - alpha <= k1_max; ++gamma) {
                const int k1 = m_h + n_v + gamma - alpha;
                const double p1 = pi_hv.probs[static_cast<std::size_t>(k1)];
                if (p1 == 0.0) continue;
                const double lg_hv = lgbinom(m_h + n_v + gamma - alpha, alpha) +
                                     lgbinom(m_h + n_v + gamma - 2 * alpha, gamma) +
                                     lgbinom(m_h + n_v - 2 * alpha, m_h - alpha);
                for (int delta = 0; m_v + n_h + delta - beta <= k2_max; ++delta) {
                    const int k2 = m_v + n_h + delta - beta;
                    const double p2 = pi_vh.probs[static_cast<std::size_t>(k2)];
                    if (p2 == 0.0) continue;
                    const double lg_vh = lgbinom(m_v + n_h - 2 * beta, m_v - beta) +
                                         lgbinom(m_v + n_h + delta - 2 * beta, delta) +
                                         lgbinom(m_v + n_h + delta - beta, beta);
                    const double lg = lg_ab + lgpow(buckets.p_mm, gamma + delta) + lg_hv + lg_vh;
                    if (lg == -std::numeric_limits<double>::infinity()) continue;
                    total += p1 * p2 * std::exp(lg);
                }
            }
        }
    }
    return total;
}

ClickTable click_table(const BucketProbs& buckets, const PairDistribution& pi_hv,
                       const PairDistribution& pi_vh, const LinkParams& link, double rel_tol) {
    link.validate();
    // HV pairs send their signal (H) to Alice and idler (V) to Bob; VH pairs
    // the other way around. Both families see the same spectral buckets.
    const SideSums hv = side_sums(pi_hv, buckets, link.t_a, link.t_b);
    const SideSums vh = side_sums(pi_vh, buckets, link.t_a, link.t_b);

    ClickTable t;
    t.p_hh = hv.s10 * vh.s01;  // p(1,0;1,0): Alice H click, Bob H click
    t.p_hv = hv.s11 * vh.s00;  // p(1,0;0,1)
    t.p_vh = hv.s00 * vh.s11;  // p(0,1;1,0)
    t.p_vv = hv.s01 * vh.s10;  // p(0,1;0,1)
    t.truncation_error = pattern_error(hv.s10, hv.e10, vh.s01, vh.e01) +
                         pattern_error(hv.s11, hv.e11, vh.s00, vh.e00) +
                         pattern_error(hv.s00, hv.e00, vh.s11, vh.e11) +
                         pattern_error(hv.s01, hv.e01, vh.s10, vh.e10);
    check_truncation(t, rel_tol, "click_table");
    return t;
}

ClickTable click_table_nowdm(const PairDistribution& pi_hv, const PairDistribution& pi_vh,
                             const LinkParams& link, double rel_tol) {
    link.validate();
    const double ta = link.t_a, tb = link.t_b;
    const double w = (1.0 - ta) * (1.0 - tb);

    // q(m, n) = pi_HV(m) pi_VH(n); m HV pairs put m H photons at Alice and m V
    // photons at Bob. The double sum over (m, n) separates per family into
    //   sum_m pi(m) C(m,i) C(m,j) t_a^i (1-t_a)^(m-i) t_b^j (1-t_b)^(m-j)
    // with i clicks at Alice and j at Bob from that family's photons.
    const auto family_sum = [&](const PairDistribution& pi, int i, int j) {
        double s = 0.0;
        double wpow = 1.0;  // w^(m - max(i,j)) tracked incrementally
        const int kmax = pi.k_max();
        for (int m = std::max(i, j); m <= kmax; ++m) {
            const double p = pi.probs[static_cast<std::size_t>(m)];
            double term = p;
            if (i == 1) term *= double(m) * ta;
            if (j == 1) term *= double(m) * tb;
            // remaining loss exponents: (1-ta)^(m-i) (1-tb)^(m-j)
            if (i == 1 && j == 0) term *= (1.0 - tb);
            if (i == 0 && j == 1) term *= (1.0 - ta);
            term *= wpow;  // shared w^(m-1) (one click) or w^m (no click) part
            s += term;
            wpow *= w;
        }
        return s;
    };

    ClickTable t;
    const double s_hv_00 = family_sum(pi_hv, 0, 0);
    const double s_hv_10 = family_sum(pi_hv, 1, 0);
    const double s_hv_01 = family_sum(pi_hv, 0, 1);
    const double s_hv_11 = family_sum(pi_hv, 1, 1);
    const double s_vh_00 = family_sum(pi_vh, 0, 0);
    const double s_vh_10 = family_sum(pi_vh, 1, 0);
    const double s_vh_01 = family_sum(pi_vh, 0, 1);
    const double s_vh_11 = family_sum(pi_vh, 1, 1);

    // pattern (i_H, i_V; j_H, j_V): HV family feeds (i_H, j_V), VH feeds (i_V, j_H)
    t.p_hh = s_hv_10 * s_vh_01;
    t.p_hv = s_hv_11 * s_vh_00;
    t.p_vh = s_hv_00 * s_vh_11;
    t.p_vv = s_hv_01 * s_vh_10;

    const auto family_err = [&](const PairDistribution& pi, int i, int j) {
        const int kmax = pi.k_max();
        if (i + j == 0)
            return pi.tail_bound * ((w >= 1.0) ? 1.0 : std::pow(w, double(kmax + 1)));
        // m^(i+j) w^(m-1..2) summand bound
        return pi.tail_bound * ((i + j == 2) ? sup_kk_z(w, kmax) + sup_k_z(w, kmax)
                                             : sup_k_z(w, kmax));
    };
    t.truncation_error =
        pattern_error(s_hv_10, family_err(pi_hv, 1, 0), s_vh_01, family_err(pi_vh, 0, 1)) +
        pattern_error(s_hv_11, family_err(pi_hv, 1, 1), s_vh_00, family_err(pi_vh, 0, 0)) +
        pattern_error(s_hv_00, family_err(pi_hv, 0, 0), s_vh_11, family_err(pi_vh, 1, 1)) +
        pattern_error(s_hv_01, family_err(pi_hv, 0, 1), s_vh_10, family_err(pi_vh, 1, 0));
    check_truncation(t, rel_tol, "click_table_nowdm");
    return t;
}

}  // namespace wdmqkd
