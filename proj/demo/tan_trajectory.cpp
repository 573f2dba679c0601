// Integrates the Euler-Lagrange equation from the jet of tan t at 0, compares
// the end point with the closed form and checks the invariants W0, W1 there.

#include <cmath>
#include <cstdio>

#include <schwarz/schwarz.hpp>

int main() {
    using namespace schwarz;
    const Jet4 init{0.0, 0.0, 1.0, 0.0, 2.0};
    const Trajectory tr = integrate(init, 1.0, 1e-10);
    const auto drift = invariant_drift(tr);
    std::printf("steps=%zu  u(1)=%.15f  tan(1)=%.15f  |err|=%.2e\n", tr.samples.size() - 1, tr.back().u,
                std::tan(1.0), std::abs(tr.back().u - std::tan(1.0)));
    std::printf("drift S=%.2e  drift C=%.2e\n", drift.s, drift.c);

    const Invariants w = invariants(OdeField::euler_lagrange(), tr.back());
    const double s = schwarzian(tr.back());
    std::printf("W1=%.2e  W0=%.12f  -0.36 S^2=%.12f\n", w.W1, w.W0, -0.36 * s * s);

    const MobiusFamily f = MobiusFamily::identity(2.0);
    const auto res = family_verify(f, 50, 0.0, 1.0);
    std::printf("closed form tan: max |S-2|=%.2e  max EL residual=%.2e\n", res.max_schwarzian, res.max_el);
    return 0;
}
