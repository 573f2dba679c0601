#pragma once

// Pointwise jet operators: the Schwarzian, the first integral C, the
// Lagrangian (u''/u')^2, the fourth-order Euler-Lagrange field, the operator
// D_u(v) = v' - (u''/u') v, and the boundary terms of the first variation.

#include "error.hpp"
#include "expr.hpp"
#include "jet.hpp"

namespace schwarz {

/// r/p - (3/2)(q/p)^2
inline double schwarzian(const Jet4& j) {
    require_regular(j);
    const double a = j.q / j.p;
    return j.r / j.p - 1.5 * a * a;
}

/// (1/p)(r/p - q^2/p^2)
inline double mercator_c(const Jet4& j) {
    require_regular(j);
    const double a = j.q / j.p;
    return (j.r / j.p - a * a) / j.p;
}

/// (q/p)^2
inline double lagrangian(const Jet4& j) {
    require_regular(j);
    const double a = j.q / j.p;
    return a * a;
}

/// u'''' forced by the Euler-Lagrange equation of (u''/u')^2:
/// F(p, q, r) = -3 q^3/p^2 + 4 q r/p.
inline double el_rhs(const Jet4& j) {
    require_regular(j);
    return -3.0 * j.q * j.q * j.q / (j.p * j.p) + 4.0 * j.q * j.r / j.p;
}

inline double d_u(const Jet4& j, const VarJet& w) {
    require_regular(j);
    return w.v1 - (j.q / j.p) * w.v;
}

/// D_u(D_u(v)) = v'' - 2(q/p) v' + (2q^2/p^2 - r/p) v
inline double d_u2(const Jet4& j, const VarJet& w) {
    require_regular(j);
    const double a = j.q / j.p;
    return w.v2 - 2.0 * a * w.v1 + (2.0 * a * a - j.r / j.p) * w.v;
}

/// Boundary term of the first variation of the integrated Schwarzian,
/// (1/u') (D_u^2(v) + S(u) v).
inline double boundary_B(const Jet4& j, const VarJet& w) {
    return (d_u2(j, w) + schwarzian(j) * w.v) / j.p;
}

/// Expanded form v''/p - 2 q v'/p^2 + q^2 v/(2 p^3) of boundary_B.
inline double boundary_B_expanded(const Jet4& j, const VarJet& w) {
    require_regular(j);
    const double p = j.p, q = j.q;
    return w.v2 / p - 2.0 * q * w.v1 / (p * p) + q * q * w.v / (2.0 * p * p * p);
}

struct BoundaryTerms {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

/// Boundary terms accompanying the integrated-by-parts forms of delta I_L.
inline BoundaryTerms boundary_terms_thm1(const Jet4& j, const VarJet& w) {
    require_regular(j);
    const double p = j.p, q = j.q, r = j.r;
    const double p2 = p * p, p3 = p2 * p;
    const double common = 2.0 * q * w.v1 / p2;
    return {common, common - q * q * w.v / p3, common - 2.0 * r * w.v / p2 + 2.0 * q * q * w.v / p3};
}

// Symbolic counterparts, for series-level checks and the invariant engine.

inline Expr el_field() { return parse("-3*q^3/p^2 + 4*q*r/p"); }
inline Expr schwarzian_expr() { return parse("r/p - 1.5*(q/p)^2"); }
inline Expr mercator_c_expr() { return parse("(r/p - (q/p)^2)/p"); }

}  // namespace schwarz
