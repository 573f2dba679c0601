#pragma once

// Shared generators and independent oracles for the test programs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <schwarz/schwarz.hpp>

namespace testing_support {

using namespace schwarz;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    double sign() { return uniform(0, 1) < 0.5 ? -1.0 : 1.0; }
    /// |x| log-uniform in [lo, hi], random sign.
    double log_magnitude(double lo, double hi) { return sign() * lo * std::pow(hi / lo, uniform(0, 1)); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Jet with |p| in [p_lo, p_hi] and moderate t, u, q, r.
inline Jet4 random_jet(Rng& rng, double p_lo = 0.1, double p_hi = 10.0) {
    return {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.log_magnitude(p_lo, p_hi), rng.uniform(-3, 3),
            rng.uniform(-3, 3)};
}

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", x);
    return buf;
}

/// u(t) = k t + a sin(b t + c) + d t^2 on [0, 1] with u' bounded away from zero.
inline std::string random_curve_text(Rng& rng) {
    const double k = rng.sign() * rng.uniform(1.0, 2.0);
    const double b = rng.uniform(0.5, 3.0);
    const double a = rng.uniform(-0.3, 0.3) / b;
    const double d = rng.uniform(-0.2, 0.2);
    return num(k) + "*t + " + num(a) + "*sin(" + num(b) + "*t + " + num(rng.uniform(-3, 3)) + ") + " + num(d) +
           "*t^2";
}

/// Smooth variation v(t) = a sin(b t + c) + d t^3 + e.
inline std::string random_variation_text(Rng& rng) {
    return num(rng.uniform(-1, 1)) + "*sin(" + num(rng.uniform(0.5, 4)) + "*t + " + num(rng.uniform(-3, 3)) +
           ") + " + num(rng.uniform(-1, 1)) + "*t^3 + " + num(rng.uniform(-1, 1));
}

/// Random Moebius family of the requested class; coefficients are O(1) and AD - BC is kept away from 0.
inline MobiusFamily random_family(Rng& rng, FamilyClass cls) {
    double sigma = 0.0;
    if (cls == FamilyClass::hyperbolic) sigma = -rng.uniform(0.1, 3.0);
    if (cls == FamilyClass::elliptic) sigma = rng.uniform(0.1, 3.0);
    for (;;) {
        const double A = rng.uniform(-2, 2), B = rng.uniform(-2, 2), C = rng.uniform(-2, 2), D = rng.uniform(-2, 2);
        if (std::abs(A * D - B * C) > 0.3) return {A, B, C, D, sigma};
    }
}

/// Start of a unit window [s, s + 1] at least `margin` away from every pole of f, searched near 0.
inline double pole_free_window(const MobiusFamily& f, double margin) {
    for (double s = 0.0; s < 10.0; s += 0.05) {
        const auto poles = family_singularities(f, s - margin, s + 1.0 + margin);
        if (poles.empty()) return s;
        const auto poles_neg = family_singularities(f, -s - margin, -s + 1.0 + margin);
        if (poles_neg.empty()) return -s;
    }
    return std::nan("");
}

/// Oracle: derivatives of tan t by hand.
inline std::array<double, 5> tan_derivatives(double t) {
    const double T = std::tan(t), S2 = 1.0 + T * T;
    return {T, S2, 2 * T * S2, 2 * S2 * S2 + 4 * T * T * S2, 16 * T * S2 * S2 + 8 * T * T * T * S2};
}

/// Oracle: hand-written Schwarzian, independent of the library formula.
inline double schwarzian_oracle(double p, double q, double r) { return (2 * p * r - 3 * q * q) / (2 * p * p); }

/// Oracle: W1 for a field whose only nonzero partial is F_r = const: -(3/8) F_r^3.
inline double w1_constant_fr(double fr) { return -0.375 * fr * fr * fr; }

/// Central difference of g at x.
inline double central_difference(const std::function<double(double)>& g, double x, double h = 1e-5) {
    return (g(x + h) - g(x - h)) / (2 * h);
}

/// |a - b| relative to max(1, |b|).
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

/// Random expression over t, u, p, q, r; finite everywhere, with no division by a variable.
inline Expr random_expr(Rng& rng, int depth) {
    if (depth <= 0 || rng.uniform(0, 1) < 0.25) {
        if (rng.uniform(0, 1) < 0.35) return Expr::number(std::round(rng.uniform(-5, 5) * 4) / 4);
        return Expr::variable(kAllVars[rng.integer(0, 4)]);
    }
    const int pick = rng.integer(0, 9);
    const Expr a = random_expr(rng, depth - 1);
    switch (pick) {
        case 0: return a + random_expr(rng, depth - 1);
        case 1: return a - random_expr(rng, depth - 1);
        case 2: return a * random_expr(rng, depth - 1);
        case 3: return a / (Expr::number(3.0) + pow(random_expr(rng, depth - 1), 2));
        case 4: return pow(a, rng.integer(0, 3));
        case 5: return sin(a);
        case 6: return cos(a);
        case 7: return exp(sin(a));
        case 8: return -a;
        case 9: return pow(Expr::number(2.0) + pow(a, 2), -rng.integer(1, 2));
        default: return a;
    }
}

}  // namespace testing_support
