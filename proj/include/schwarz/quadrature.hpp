#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "error.hpp"

namespace schwarz {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  ///< sum of |K15 - G7| over the final partition
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

// 15-point Kronrod nodes (non-negative half) and weights; every other node is a 7-point Gauss node.
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// `breakpoints` inside (a, b) seed the initial partition (kinks, support
/// edges). Bisects the worst segment until the summed error estimate is
/// below `abs_tol`.
template <class F>
QuadratureResult integrate_gk15(const F& f, double a, double b, double abs_tol = 1e-11,
                                std::span<const double> breakpoints = {}, int max_segments = 4000) {
    QuadratureResult out;
    if (a == b) return out;
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b), hi = std::max(a, b);

    std::vector<double> edges{lo};
    for (double x : breakpoints)
        if (x > lo && x < hi) edges.push_back(x);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<detail::Segment> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto s = detail::gk15(f, edges[i], edges[i + 1]);
        out.evaluations += 15;
        total += s.value;
        err += s.error;
        heap.push(s);
    }
    while (err > abs_tol) {
        if (static_cast<int>(heap.size()) >= max_segments) {
            out.converged = false;
            break;
        }
        const detail::Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the incremental updates.
    total = 0.0;
    err = 0.0;
    for (auto h = heap; !h.empty(); h.pop()) {
        total += h.top().value;
        err += h.top().error;
    }
    out.value = sign * total;
    out.error = err;
    return out;
}

}  // namespace schwarz
