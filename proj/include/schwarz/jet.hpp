#pragma once

#include <array>
#include <cmath>
#include <string>

#include "error.hpp"

namespace schwarz {

/// Smallest |u'| accepted by Schwarzian-type evaluations.
inline constexpr double kSingularP = 1e-12;

/// Point of the 3-jet space: t, u and the derivatives p=u', q=u'', r=u'''.
struct Jet4 {
    double t = 0.0;
    double u = 0.0;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;

    friend bool operator==(const Jet4&, const Jet4&) = default;
};

/// Variational vector field sampled at one time: v, v', v''.
struct VarJet {
    double v = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;

    friend bool operator==(const VarJet&, const VarJet&) = default;
};

inline VarJet operator+(const VarJet& a, const VarJet& b) { return {a.v + b.v, a.v1 + b.v1, a.v2 + b.v2}; }
inline VarJet operator*(double s, const VarJet& a) { return {s * a.v, s * a.v1, s * a.v2}; }

inline void require_regular(const Jet4& j, double floor = kSingularP) {
    if (!(std::abs(j.p) >= floor)) {
        throw SingularJetError("singular jet: |p| = " + std::to_string(std::abs(j.p)) + " below " +
                               std::to_string(floor));
    }
}

inline std::array<double, 5> to_array(const Jet4& j) { return {j.t, j.u, j.p, j.q, j.r}; }
inline Jet4 jet_from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }

}  // namespace schwarz
