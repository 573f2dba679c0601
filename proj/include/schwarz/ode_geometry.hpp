#pragma once

// Generalized Wuenschmann invariants W0, W1 of a fourth-order ODE
// u'''' = F(t, u, p, q, r), and linearization along a solution.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "closed_form.hpp"
#include "el_ode.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "formal.hpp"
#include "jet.hpp"
#include "schwarzian.hpp"
#include "taylor.hpp"

namespace schwarz {

/// Series order used for total derivatives (W0 needs d^3/dt^3 F_r).
inline constexpr int kInvariantOrder = 8;

/// Right-hand side F of u'''' = F together with its partials in p, q, r.
class OdeField {
public:
    explicit OdeField(Expr F)
        : F_(std::move(F)),
          Fp_(differentiate(F_, Var::p)),
          Fq_(differentiate(F_, Var::q)),
          Fr_(differentiate(F_, Var::r)) {}

    explicit OdeField(std::string_view text) : OdeField(parse(text)) {}

    /// The Euler-Lagrange field of the Lagrangian (u''/u')^2.
    static OdeField euler_lagrange() { return OdeField(el_field()); }

    const Expr& F() const noexcept { return F_; }
    const Expr& Fp() const noexcept { return Fp_; }
    const Expr& Fq() const noexcept { return Fq_; }
    const Expr& Fr() const noexcept { return Fr_; }

private:
    Expr F_, Fp_, Fq_, Fr_;
};

/// Partials of F and their total derivatives at one jet.
struct FieldDerivatives {
    double Fp = 0.0;
    double Fq = 0.0, dFq = 0.0, d2Fq = 0.0;
    double Fr = 0.0, dFr = 0.0, d2Fr = 0.0, d3Fr = 0.0;
};

inline FieldDerivatives field_derivatives(const OdeField& field, const Jet4& j) {
    const FormalSolution sol = formal_solution(field.F(), j, kInvariantOrder);
    const TaylorEnv env = sol.env();
    const TaylorScalar fr = taylor_eval(field.Fr(), env);
    const TaylorScalar fq = taylor_eval(field.Fq(), env);
    FieldDerivatives d;
    d.Fp = eval_scalar(field.Fp(), j);
    d.Fq = fq.derivative(0);
    d.dFq = fq.derivative(1);
    d.d2Fq = fq.derivative(2);
    d.Fr = fr.derivative(0);
    d.dFr = fr.derivative(1);
    d.d2Fr = fr.derivative(2);
    d.d3Fr = fr.derivative(3);
    return d;
}

inline double w1(const FieldDerivatives& d) {
    return 9.0 / 4.0 * d.Fr * d.dFr - 1.5 * d.d2Fr + 3.0 * d.dFq - 3.0 / 8.0 * d.Fr * d.Fr * d.Fr -
           1.5 * d.Fq * d.Fr - 3.0 * d.Fp;
}

/// The (7/20) d^2F_r term is weighted by F_r.
inline double w0(const FieldDerivatives& d) {
    const double Fr = d.Fr, Fr2 = Fr * Fr;
    return 11.0 / 1600.0 * Fr2 * Fr2 - 9.0 / 50.0 * Fr2 * d.dFr - 1.0 / 200.0 * Fr2 * d.Fq +
           21.0 / 100.0 * d.dFr * d.dFr + 1.0 / 50.0 * d.dFr * d.Fq - 9.0 / 100.0 * d.Fq * d.Fq +
           7.0 / 20.0 * Fr * d.d2Fr - 1.0 / 5.0 * d.d3Fr + 3.0 / 10.0 * d.d2Fq - 1.0 / 4.0 * Fr * d.dFq;
}

inline double w1(const OdeField& field, const Jet4& j) { return w1(field_derivatives(field, j)); }
inline double w0(const OdeField& field, const Jet4& j) { return w0(field_derivatives(field, j)); }

struct Invariants {
    double W0 = 0.0;
    double W1 = 0.0;
};

inline Invariants invariants(const OdeField& field, const Jet4& j) {
    const FieldDerivatives d = field_derivatives(field, j);
    return {w0(d), w1(d)};
}

inline void to_json(nlohmann::json& out, const Invariants& inv) { out = {{"W0", inv.W0}, {"W1", inv.W1}}; }

/// Coefficients of v'''' = a3 v''' + a2 v'' + a1 v' at one time.
struct Linearization {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

inline Linearization linearize(const OdeField& field, const Jet4& base_jet) {
    return {eval_scalar(field.Fp(), base_jet), eval_scalar(field.Fq(), base_jet), eval_scalar(field.Fr(), base_jet)};
}

inline Linearization linearize(const OdeField& field, const MobiusFamily& base, double t) {
    return linearize(field, family_eval_jet(base, t));
}

inline Linearization linearize(const OdeField& field, const Trajectory& base, double t) {
    return linearize(field, trajectory_jet(base, t));
}

/// Linear ODE v'''' = a3(t) v''' + a2(t) v'' + a1(t) v' along a fixed base solution.
class LinearizedOde {
public:
    explicit LinearizedOde(std::function<Linearization(double)> coeffs) : coeffs_(std::move(coeffs)) {}

    LinearizedOde(OdeField field, MobiusFamily base)
        : coeffs_([field = std::move(field), base](double t) { return linearize(field, base, t); }) {}

    Linearization at(double t) const { return coeffs_(t); }

private:
    std::function<Linearization(double)> coeffs_;
};

/// v, v', v'', v''', v'''' at t.
using ScalarJetFn = std::function<std::array<double, 5>(double)>;

/// Lift a scalar function written over TaylorScalar to its derivatives 0..4.
template <class Fn>
ScalarJetFn series_function(Fn fn) {
    return [fn](double t) {
        const TaylorScalar v = fn(TaylorScalar::identity(t, 4));
        return std::array<double, 5>{v.derivative(0), v.derivative(1), v.derivative(2), v.derivative(3),
                                     v.derivative(4)};
    };
}

/// Max over basis functions and sample times of |v'''' - a3 v''' - a2 v'' - a1 v'|.
inline double verify_linear_basis(const LinearizedOde& lin, std::span<const ScalarJetFn> basis,
                                  std::span<const double> ts) {
    double worst = 0.0;
    for (double t : ts) {
        const Linearization c = lin.at(t);
        for (const auto& fn : basis) {
            const auto v = fn(t);
            worst = std::max(worst, std::abs(v[4] - c.a3 * v[3] - c.a2 * v[2] - c.a1 * v[1]));
        }
    }
    return worst;
}

/// The three normalized base solutions u = t, e^t, tan t.
enum class BaseSolution { line, exp, tan };

inline MobiusFamily base_family(BaseSolution b) {
    switch (b) {
        case BaseSolution::line: return MobiusFamily::identity(0.0);
        case BaseSolution::exp: return MobiusFamily::identity(-0.5);  // e^{a t}, a = sqrt(-2 sigma) = 1
        case BaseSolution::tan: return MobiusFamily::identity(2.0);   // tan(w t), w = sqrt(sigma/2) = 1
    }
    return MobiusFamily::identity(0.0);
}

/// Solution bases of the linearizations at u = t, e^t and tan t:
/// {t^3, t^2, t, 1}, {e^t, t e^t, e^{2t}, 1}, {tan t, t/cos^2 t, tan^2 t, 1}.
inline std::vector<ScalarJetFn> linearization_basis(BaseSolution b) {
    using S = TaylorScalar;
    auto one = series_function([](const S& t) { return S(1.0, t.base_point(), t.order()); });
    switch (b) {
        case BaseSolution::line:
            return {series_function([](const S& t) { return pow(t, 3); }),
                    series_function([](const S& t) { return pow(t, 2); }), series_function([](const S& t) { return t; }),
                    one};
        case BaseSolution::exp:
            return {series_function([](const S& t) { return exp(t); }),
                    series_function([](const S& t) { return t * exp(t); }),
                    series_function([](const S& t) { return exp(2.0 * t); }), one};
        case BaseSolution::tan:
            return {series_function([](const S& t) { return tan(t); }),
                    series_function([](const S& t) { return t / pow(cos(t), 2); }),
                    series_function([](const S& t) { return pow(tan(t), 2); }), one};
    }
    return {};
}

}  // namespace schwarz
