#pragma once

#include <cmath>

#include "error.hpp"
#include "expr.hpp"
#include "jet.hpp"
#include "taylor.hpp"

namespace schwarz {

/// Taylor series of a formal solution of u'''' = F about init.t.
/// p, q, r are the termwise derivatives of u; all four share one order.
struct FormalSolution {
    TaylorScalar u;
    TaylorScalar p;
    TaylorScalar q;
    TaylorScalar r;

    /// Environment for taylor_eval, including the identity series for t.
    TaylorEnv env() const {
        return {{Var::t, TaylorScalar::identity(u.base_point(), u.order())},
                {Var::u, u},
                {Var::p, p},
                {Var::q, q},
                {Var::r, r}};
    }
};

/// Series solution of u'''' = F through `init` to `order` (>= 4).
///
/// u is propagated to order + 3 so that p, q, r are exact through `order`.
/// Coefficient m of F depends on u-coefficients up to m + 3, so each pass
/// fixes the next u-coefficient c_{m+4} = F_m / ((m+1)(m+2)(m+3)(m+4)).
inline FormalSolution formal_solution(const Expr& F, const Jet4& init, int order) {
    if (order < 4) throw InvalidArgument("formal_solution needs order >= 4");
    const int n = order + 3;
    const double t0 = init.t;
    TaylorScalar u(0.0, t0, n);
    u[0] = init.u;
    u[1] = init.p;
    u[2] = init.q / 2.0;
    u[3] = init.r / 6.0;

    for (int m = 0; m + 4 <= n; ++m) {
        // Only coefficients 0..m of F are needed; evaluate at the smallest sufficient order.
        const TaylorScalar um = u.with_order(m + 3);
        const TaylorScalar pm = um.differentiated();
        const TaylorScalar qm = pm.differentiated();
        const TaylorScalar rm = qm.differentiated();
        const TaylorEnv env{{Var::t, TaylorScalar::identity(t0, m)},
                            {Var::u, um.with_order(m)},
                            {Var::p, pm.with_order(m)},
                            {Var::q, qm.with_order(m)},
                            {Var::r, rm.with_order(m)}};
        const TaylorScalar f = taylor_eval(F, env);
        if (!std::isfinite(f[static_cast<std::size_t>(m)])) throw DomainError("field is singular along the formal solution");
        u[static_cast<std::size_t>(m) + 4] =
            f[static_cast<std::size_t>(m)] / (static_cast<double>(m + 1) * (m + 2) * (m + 3) * (m + 4));
    }

    const TaylorScalar p = u.differentiated();
    const TaylorScalar q = p.differentiated();
    const TaylorScalar r = q.differentiated();
    return {u.with_order(order), p.with_order(order), q.with_order(order), r.with_order(order)};
}

/// k-th total derivative d^k/dt^k of G along the flow of u'''' = F through j.
inline double total_derivative(const Expr& G, const FormalSolution& sol, int k) {
    return taylor_eval(G, sol.env()).derivative(k);
}

}  // namespace schwarz
