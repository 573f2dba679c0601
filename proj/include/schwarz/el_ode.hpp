#pragma once

// Adaptive integration of u'''' = F(p, q, r) as a first-order system on the
// jet (u, p, q, r), with first-integral monitoring and dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "jet.hpp"
#include "schwarzian.hpp"

namespace schwarz {

/// Integration halts once |p| drops below this.
inline constexpr double kTrajectoryPFloor = 1e-8;

enum class TrajectoryStatus { completed, stopped_near_singularity };

inline const char* to_string(TrajectoryStatus s) {
    return s == TrajectoryStatus::completed ? "completed" : "stopped-near-singularity";
}

/// Accepted integrator steps, strictly monotone in t along the integration direction.
struct Trajectory {
    std::vector<Jet4> samples;
    std::vector<double> s_values;
    std::vector<double> c_values;
    double tolerance = 0.0;
    TrajectoryStatus status = TrajectoryStatus::completed;
    int rejected_steps = 0;

    const Jet4& front() const { return samples.front(); }
    const Jet4& back() const { return samples.back(); }
    bool forward() const { return samples.size() < 2 || samples.back().t > samples.front().t; }
};

struct IntegratorOptions {
    std::size_t max_steps = 2'000'000;
    double initial_step = 0.0;  ///< 0 selects automatically
};

namespace detail {

using State = std::array<double, 4>;

inline State el_system(const State& y) {
    const double p = y[1], q = y[2], r = y[3];
    return {p, q, r, -3.0 * q * q * q / (p * p) + 4.0 * q * r / p};
}

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct StepResult {
    State y;
    State k_end;
    double err = 0.0;  // max_i |e_i| / (1 + max(|y_i|, |y_new_i|))
};

// One DP5 step; k1 = f(y) is passed in (FSAL).
inline StepResult dp5_step(const State& y, const State& k1, double h) {
    using T = DormandPrince;
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State out = y;
        for (const auto& [c, k] : terms)
            for (int i = 0; i < 4; ++i) out[i] += h * c * (*k)[i];
        return out;
    };
    const State k2 = el_system(comb({{T::a21, &k1}}));
    const State k3 = el_system(comb({{T::a31, &k1}, {T::a32, &k2}}));
    const State k4 = el_system(comb({{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
    const State k5 = el_system(comb({{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}));
    const State k6 = el_system(comb({{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}));
    StepResult res;
    res.y = comb({{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
    res.k_end = el_system(res.y);
    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] +
                              T::e7 * res.k_end[i]);
        const double sc = 1.0 + std::max(std::abs(y[i]), std::abs(res.y[i]));
        err = std::max(err, std::abs(e) / sc);
    }
    res.err = err;
    return res;
}

inline bool finite(const State& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrate the Euler-Lagrange system from `init` to `t_end`.
///
/// Error per unit step: the scaled local error estimate of each accepted step
/// is at most tol * |h|. Every accepted step is recorded. Integration stops
/// early with `stopped_near_singularity` when |p| falls below
/// kTrajectoryPFloor or the step size collapses.
inline Trajectory integrate(const Jet4& init, double t_end, double tol, const IntegratorOptions& opts = {}) {
    if (!(tol >= 1e-13 && tol <= 1e-3)) throw InvalidArgument("tolerance must lie in [1e-13, 1e-3]");
    if (!(std::abs(init.p) >= kTrajectoryPFloor)) throw SingularJetError("singular initial jet (p=0)");
    if (!std::isfinite(t_end)) throw InvalidArgument("t_end must be finite");

    Trajectory tr;
    tr.tolerance = tol;
    auto record = [&](const Jet4& j) {
        tr.samples.push_back(j);
        tr.s_values.push_back(schwarzian(j));
        tr.c_values.push_back(mercator_c(j));
    };
    record(init);

    const double span = t_end - init.t;
    if (span == 0.0) return tr;
    const double dir = span > 0 ? 1.0 : -1.0;

    double t = init.t;
    detail::State y{init.u, init.p, init.q, init.r};
    detail::State k = detail::el_system(y);
    double h = opts.initial_step > 0 ? opts.initial_step : std::min(std::abs(span), 1e-3);

    constexpr double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
    constexpr double fac_min = 0.2, fac_max = 5.0;
    double err_prev = 1.0;
    bool last_rejected = false;

    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        const double remaining = std::abs(t_end - t);
        if (remaining <= 1e-14 * std::max(1.0, std::abs(t_end))) return tr;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            tr.status = TrajectoryStatus::stopped_near_singularity;
            return tr;
        }
        const bool final_step = h >= remaining;
        const double hs = final_step ? remaining : h;

        const detail::StepResult res = detail::dp5_step(y, k, dir * hs);
        const double errn = detail::finite(res.y) ? res.err / (tol * hs) : 1e10;

        if (errn <= 1.0) {
            const double t_new = final_step ? t_end : t + dir * hs;
            if (std::abs(res.y[1]) < kTrajectoryPFloor) {
                tr.status = TrajectoryStatus::stopped_near_singularity;
                return tr;
            }
            t = t_new;
            y = res.y;
            k = res.k_end;
            record({t, y[0], y[1], y[2], y[3]});
            if (final_step) return tr;
            double fac = safety * std::pow(std::max(errn, 1e-10), -alpha) * std::pow(err_prev, beta);
            fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
            h = hs * fac;
            err_prev = std::max(errn, 1e-4);
            last_rejected = false;
        } else {
            ++tr.rejected_steps;
            const double fac = std::max(fac_min, safety * std::pow(errn, -alpha));
            h = hs * fac;
            last_rejected = true;
        }
    }
    tr.status = TrajectoryStatus::stopped_near_singularity;
    return tr;
}

struct InvariantDrift {
    double s = 0.0;
    double c = 0.0;
};

/// Largest deviation of S and C from their initial values.
inline InvariantDrift invariant_drift(const Trajectory& tr) {
    if (tr.samples.empty()) throw InvalidArgument("empty trajectory");
    InvariantDrift d;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        d.s = std::max(d.s, std::abs(tr.s_values[i] - tr.s_values.front()));
        d.c = std::max(d.c, std::abs(tr.c_values[i] - tr.c_values.front()));
    }
    return d;
}

namespace detail {

// Two-point Hermite interpolant on x in [0, 1] matching derivatives
// 0..m-1 at both ends (degree 2m-1). Returns monomial coefficients.
inline std::vector<double> hermite_two_point(std::span<const double> left, std::span<const double> right) {
    const int m = static_cast<int>(left.size());
    const int n = 2 * m;
    auto node = [&](int i) { return i < m ? 0.0 : 1.0; };
    auto deriv = [&](int i, int order) { return i < m ? left[order] : right[order]; };
    auto inv_fact = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return 1.0 / f;
    };

    std::vector<std::vector<double>> Q(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) Q[i][0] = deriv(i, 0);
    for (int j = 1; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            if (node(i) == node(i - j)) {
                Q[i][j] = deriv(i, j) * inv_fact(j);
            } else {
                Q[i][j] = (Q[i][j - 1] - Q[i - 1][j - 1]) / (node(i) - node(i - j));
            }
        }
    }
    // Newton form -> monomial basis.
    std::vector<double> coeffs(n, 0.0);
    std::vector<double> basis(n + 1, 0.0);
    basis[0] = 1.0;
    int basis_deg = 0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k <= basis_deg; ++k) coeffs[k] += Q[j][j] * basis[k];
        const double z = node(j);
        for (int k = basis_deg + 1; k >= 1; --k) basis[k] = basis[k - 1] - z * basis[k];
        basis[0] = -z * basis[0];
        ++basis_deg;
    }
    return coeffs;
}

inline double polyval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

}  // namespace detail

/// u, u', u'', u''', u'''' at t, interpolated between accepted steps.
///
/// Component k of (u, p, q, r) uses the two-point Hermite interpolant that
/// matches its own derivatives (the jet entries k..3 and F) at both step ends;
/// u'''' is F at the interpolated jet. Interpolating each component
/// separately keeps the high derivatives free of cancellation against u.
inline std::array<double, 5> trajectory_derivatives(const Trajectory& tr, double t) {
    const auto& s = tr.samples;
    if (s.empty()) throw InvalidArgument("empty trajectory");
    const double lo = std::min(s.front().t, s.back().t), hi = std::max(s.front().t, s.back().t);
    const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (t < lo - slack || t > hi + slack) throw InvalidArgument("time outside trajectory range");
    if (s.size() == 1) return {s[0].u, s[0].p, s[0].q, s[0].r, el_rhs(s[0])};

    const bool fwd = tr.forward();
    auto it = fwd ? std::upper_bound(s.begin(), s.end(), t, [](double x, const Jet4& j) { return x < j.t; })
                  : std::upper_bound(s.begin(), s.end(), t, [](double x, const Jet4& j) { return x > j.t; });
    const auto idx = std::clamp<std::ptrdiff_t>(it - s.begin(), 1, static_cast<std::ptrdiff_t>(s.size()) - 1);
    const std::size_t i1 = static_cast<std::size_t>(idx), i0 = i1 - 1;
    const Jet4& a = fwd ? s[i0] : s[i1];
    const Jet4& b = fwd ? s[i1] : s[i0];

    const double h = b.t - a.t;
    const double x = (t - a.t) / h;
    const std::array<double, 5> da{a.u, a.p, a.q, a.r, el_rhs(a)};
    const std::array<double, 5> db{b.u, b.p, b.q, b.r, el_rhs(b)};

    std::array<double, 5> out{};
    for (int k = 0; k < 4; ++k) {
        const int m = 5 - k;
        std::vector<double> left(m), right(m);
        double hj = 1.0;
        for (int j = 0; j < m; ++j) {
            left[j] = da[k + j] * hj;
            right[j] = db[k + j] * hj;
            hj *= h;
        }
        out[k] = detail::polyval(detail::hermite_two_point(left, right), x);
    }
    out[4] = el_rhs({t, out[0], out[1], out[2], out[3]});
    return out;
}

inline Jet4 trajectory_jet(const Trajectory& tr, double t) {
    const auto d = trajectory_derivatives(tr, t);
    return {t, d[0], d[1], d[2], d[3]};
}

/// CSV with header t,u,p,q,r,S,C; 17 significant digits; LF line endings.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,u,p,q,r,S,C\n";
    char buf[512];
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const Jet4& j = tr.samples[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", j.t, j.u, j.p, j.q, j.r,
                      tr.s_values[i], tr.c_values[i]);
        os << buf;
    }
}

}  // namespace schwarz
