#pragma once

#include "wdmqkd/channels.hpp"
#include "wdmqkd/source.hpp"

namespace wdmqkd {

struct LinkParams {
    double t_a = 1.0;  // source -> Alice transmittance
    double t_b = 1.0;  // source -> Bob transmittance

    void validate() const;  // throws ConfigError
};

// Probabilities of the four accepted single-click patterns
// p(i_H, i_V; j_H, j_V) with exactly one click on each side, labelled by the
// clicking detector pair (Alice polarization, Bob polarization).
struct ClickTable {
    double p_hh = 0.0;  // p(1,0;1,0)
    double p_hv = 0.0;  // p(1,0;0,1)
    double p_vh = 0.0;  // p(0,1;1,0)
    double p_vv = 0.0;  // p(0,1;0,1)
    double truncation_error = 0.0;

    double sum() const { return p_hh + p_hv + p_vh + p_vv; }
};

// Joint probability q(m_H, m_V, n_H, n_V) that the given photon numbers enter
// Alice's and Bob's channels of one pair; the quadruple sum over bucket
// assignments of the emitted pairs, evaluated term by term.
double joint_entry_prob(int m_h, int m_v, int n_h, int n_v, const BucketProbs& buckets,
                        const PairDistribution& pi_hv, const PairDistribution& pi_vh);

// Single-click pattern probabilities after binomial loss in t_a / t_b.
// The infinite photon-number sums are resummed exactly over the truncated
// distributions; truncation_error carries a certified bound from the
// distributions' tail bounds and is checked against rel_tol * table sum.
ClickTable click_table(const BucketProbs& buckets, const PairDistribution& pi_hv,
                       const PairDistribution& pi_vh, const LinkParams& link,
                       double rel_tol = 1e-9);

// Specialization without WDM channels: every photon reaches its detector
// station, q(m, n) = pi_HV(m) * pi_VH(n).
ClickTable click_table_nowdm(const PairDistribution& pi_hv, const PairDistribution& pi_vh,
                             const LinkParams& link, double rel_tol = 1e-9);

}  // namespace wdmqkd
