#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace wdmqkd::detail {

// 15-point Gauss-Kronrod pair (QUADPACK dqk15 abscissas/weights).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15Wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15Wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct QuadEstimate {
    double value;
    double error;
};

template <typename F>
QuadEstimate gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double kron = kGk15Wk[7] * f(c);
    double gauss = kGk15Wg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double lo = f(c - h * kGk15X[i]);
        const double hi = f(c + h * kGk15X[i]);
        kron += kGk15Wk[i] * (lo + hi);
        if (i % 2 == 1) gauss += kGk15Wg[i / 2] * (lo + hi);
    }
    return {kron * h, std::abs(kron - gauss) * h};
}

// Bisects until the panel error estimate meets its absolute budget. A forced
// minimum depth guards against spuriously agreeing rules on panels much wider
// than the integrand's features.
template <typename F>
double adaptive_panel(const F& f, double a, double b, double eps_abs, int min_depth,
                      int max_depth, double& err_accum) {
    const QuadEstimate est = gk15(f, a, b);
    if ((min_depth <= 0 && est.error <= eps_abs) || max_depth <= 0) {
        err_accum += est.error;
        return est.value;
    }
    const double mid = 0.5 * (a + b);
    return adaptive_panel(f, a, mid, 0.5 * eps_abs, min_depth - 1, max_depth - 1, err_accum) +
           adaptive_panel(f, mid, b, 0.5 * eps_abs, min_depth - 1, max_depth - 1, err_accum);
}

// Integrates over the sorted breakpoint sequence; the points must bracket the
// integrand's features so no panel is much wider than the local scale.
template <typename F>
double integrate_panels(const F& f, std::vector<double> points, double rel_tol,
                        double& err_out) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    err_out = 0.0;
    if (points.size() < 2) return 0.0;

    // coarse pass to size the absolute budget
    double coarse = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        coarse += std::abs(gk15(f, points[i], points[i + 1]).value);
    const double eps_abs =
        std::max(rel_tol * coarse, 1e-300) / double(points.size() - 1);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        total += adaptive_panel(f, points[i], points[i + 1], eps_abs, 2, 40, err_out);
    return total;
}

}  // namespace wdmqkd::detail
