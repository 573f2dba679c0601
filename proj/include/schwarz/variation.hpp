#pragma once

// First variations of I_L = int (u''/u')^2 dt and I_S = int S(u) dt, the
// operator D_u on variational vector fields, and the extended class of
// variations constrained only by the endpoint condition on B.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "closed_form.hpp"
#include "el_ode.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "jet.hpp"
#include "quadrature.hpp"
#include "schwarzian.hpp"
#include "taylor.hpp"

namespace schwarz {

/// Curves with |u'| below this anywhere on their sample grid are rejected.
inline constexpr double kCurvePFloor = 1e-8;
/// Absolute tolerance of every functional quadrature.
inline constexpr double kQuadratureTol = 1e-11;

class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Scalar curve u(t) on [t0, t1] with derivatives through order 4.
class CurveFn {
public:
    using Derivatives = std::array<double, 5>;

    CurveFn(std::function<Derivatives(double)> fn, double t0, double t1, std::string label = "curve",
            int check_points = 65)
        : fn_(std::move(fn)), t0_(t0), t1_(t1), label_(std::move(label)) {
        if (!(t0 < t1)) throw InvalidArgument("curve interval must satisfy t0 < t1");
        for (int i = 0; i < check_points; ++i) {
            const double t = t0 + (t1 - t0) * i / (check_points - 1);
            const double p = fn_(t)[1];
            if (!(std::abs(p) >= kCurvePFloor)) {
                throw SingularJetError("curve '" + label_ + "' has u' = " + std::to_string(p) +
                                       " near t = " + std::to_string(t));
            }
        }
    }

    static CurveFn from_family(const MobiusFamily& f, double t0, double t1) {
        nlohmann::json j = f;
        return CurveFn([f](double t) { return family_derivatives(f, t); }, t0, t1, "family " + j.dump());
    }

    /// u given as an expression in t.
    static CurveFn from_expr(const Expr& e, double t0, double t1) {
        return CurveFn(
            [e](double t) {
                const TaylorScalar s = taylor_eval(e, {{Var::t, TaylorScalar::identity(t, 4)}});
                return Derivatives{s.derivative(0), s.derivative(1), s.derivative(2), s.derivative(3), s.derivative(4)};
            },
            t0, t1, to_string(e));
    }

    static CurveFn from_trajectory(Trajectory tr, double t0, double t1) {
        auto shared = std::make_shared<const Trajectory>(std::move(tr));
        return CurveFn([shared](double t) { return trajectory_derivatives(*shared, t); }, t0, t1, "trajectory");
    }

    Derivatives derivatives(double t) const { return fn_(t); }
    Jet4 jet(double t) const {
        const auto d = fn_(t);
        return {t, d[0], d[1], d[2], d[3]};
    }
    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }
    const std::string& label() const noexcept { return label_; }

private:
    std::function<Derivatives(double)> fn_;
    double t0_, t1_;
    std::string label_;
};

/// v, v', v'', v''' at one time.
struct VariationJet {
    double v = 0.0, v1 = 0.0, v2 = 0.0, v3 = 0.0;
    VarJet var_jet() const { return {v, v1, v2}; }
};

/// Variational vector field v(t), C^1 at worst with piecewise-smooth second derivative.
///
/// `has_third()` is false when v'' jumps (the glued parabola); v''' is then
/// meaningless and the integrated Schwarzian of u + s v is taken through the
/// exact-differential identity rather than by direct quadrature.
class VariationFn {
public:
    VariationFn(std::function<VariationJet(double)> fn, std::vector<double> breakpoints = {}, bool has_third = true)
        : fn_(std::move(fn)), breakpoints_(std::move(breakpoints)), has_third_(has_third) {}

    static VariationFn zero() {
        return VariationFn([](double) { return VariationJet{}; });
    }

    /// v given as an expression in t.
    static VariationFn from_expr(const Expr& e) {
        return VariationFn([e](double t) {
            const TaylorScalar s = taylor_eval(e, {{Var::t, TaylorScalar::identity(t, 3)}});
            return VariationJet{s.derivative(0), s.derivative(1), s.derivative(2), s.derivative(3)};
        });
    }

    VariationJet operator()(double t) const { return fn_(t); }
    VarJet at(double t) const { return fn_(t).var_jet(); }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    bool has_third() const noexcept { return has_third_; }

    friend VariationFn operator+(const VariationFn& a, const VariationFn& b) {
        std::vector<double> bp = a.breakpoints_;
        bp.insert(bp.end(), b.breakpoints_.begin(), b.breakpoints_.end());
        return VariationFn(
            [fa = a.fn_, fb = b.fn_](double t) {
                const auto x = fa(t), y = fb(t);
                return VariationJet{x.v + y.v, x.v1 + y.v1, x.v2 + y.v2, x.v3 + y.v3};
            },
            std::move(bp), a.has_third_ && b.has_third_);
    }

    friend VariationFn operator*(double s, const VariationFn& a) {
        return VariationFn(
            [fa = a.fn_, s](double t) {
                const auto x = fa(t);
                return VariationJet{s * x.v, s * x.v1, s * x.v2, s * x.v3};
            },
            a.breakpoints_, a.has_third_);
    }

private:
    std::function<VariationJet(double)> fn_;
    std::vector<double> breakpoints_;
    bool has_third_;
};

/// amplitude * exp(-1/(1 - x^2)), x = (t - center)/radius, zero for |x| >= 1.
struct BumpFn {
    double center = 0.0;
    double radius = 1.0;
    double amplitude = 1.0;

    double lo() const { return center - radius; }
    double hi() const { return center + radius; }

    /// phi, phi', phi'', phi''' at t.
    std::array<double, 4> derivatives(double t) const {
        const double x = (t - center) / radius;
        if (!(std::abs(x) < 1.0)) return {0.0, 0.0, 0.0, 0.0};
        const double w0 = 1.0 - x * x;
        if (-1.0 / w0 < -700.0) return {0.0, 0.0, 0.0, 0.0};
        const TaylorScalar X = (TaylorScalar::identity(t, 3) + (-center)) * (1.0 / radius);
        const TaylorScalar w = 1.0 + (-(X * X));
        const TaylorScalar phi = amplitude * exp(-(TaylorScalar(1.0, t, 3) / w));
        return {phi.derivative(0), phi.derivative(1), phi.derivative(2), phi.derivative(3)};
    }

    double operator()(double t) const {
        const double x = (t - center) / radius;
        if (!(std::abs(x) < 1.0)) return 0.0;
        return amplitude * std::exp(-1.0 / (1.0 - x * x));
    }

    VariationFn as_variation() const {
        const BumpFn self = *this;
        return VariationFn(
            [self](double t) {
                const auto d = self.derivatives(t);
                return VariationJet{d[0], d[1], d[2], d[3]};
            },
            {lo(), hi()});
    }
};

inline void to_json(nlohmann::json& j, const BumpFn& b) {
    j = {{"center", b.center}, {"radius", b.radius}, {"amplitude", b.amplitude}};
}

// ---------------------------------------------------------------------------
// Functionals

namespace detail {

inline void check_window(const CurveFn& u, double t0, double t1) {
    const double slack = 1e-12 * std::max(1.0, u.t1() - u.t0());
    if (!(t0 < t1) || t0 < u.t0() - slack || t1 > u.t1() + slack) {
        throw InvalidArgument("interval [" + std::to_string(t0) + ", " + std::to_string(t1) +
                              "] outside the curve's domain");
    }
}

template <class F>
double quad(const F& f, double t0, double t1, const std::vector<double>& breakpoints = {}) {
    return integrate_gk15(f, t0, t1, kQuadratureTol, breakpoints).value;
}

// Jet of u + s v (r perturbed only when v''' exists).
inline Jet4 perturbed(const CurveFn& u, const VariationFn& v, double s, double t) {
    Jet4 j = u.jet(t);
    const VariationJet w = v(t);
    j.u += s * w.v;
    j.p += s * w.v1;
    j.q += s * w.v2;
    if (v.has_third()) j.r += s * w.v3;
    return j;
}

}  // namespace detail

/// int_{t0}^{t1} (u''/u')^2 dt
inline double functional_IL(const CurveFn& u, double t0, double t1) {
    detail::check_window(u, t0, t1);
    return detail::quad([&](double t) { return lagrangian(u.jet(t)); }, t0, t1);
}

/// int_{t0}^{t1} S(u) dt
inline double functional_IS(const CurveFn& u, double t0, double t1) {
    detail::check_window(u, t0, t1);
    return detail::quad([&](double t) { return schwarzian(u.jet(t)); }, t0, t1);
}

enum class Functional { IL, IS };

/// Central difference (I[u + h v] - I[u - h v]) / (2h).
inline double delta_fd(Functional which, const CurveFn& u, const VariationFn& v, double t0, double t1,
                       double h = 1e-5) {
    detail::check_window(u, t0, t1);
    const auto& bp = v.breakpoints();
    auto value = [&](double s) {
        auto IL = [&] {
            return detail::quad([&](double t) { return lagrangian(detail::perturbed(u, v, s, t)); }, t0, t1, bp);
        };
        if (which == Functional::IL) return IL();
        if (v.has_third()) {
            return detail::quad([&](double t) { return schwarzian(detail::perturbed(u, v, s, t)); }, t0, t1, bp);
        }
        // S = (q/p)' - L/2 holds for any C^1 perturbation with piecewise-C^2 v.
        const Jet4 a = detail::perturbed(u, v, s, t0), b = detail::perturbed(u, v, s, t1);
        require_regular(a);
        require_regular(b);
        return b.q / b.p - a.q / a.p - 0.5 * IL();
    };
    return (value(h) - value(-h)) / (2.0 * h);
}

/// Richardson-extrapolated delta_fd: (4 D(h/2) - D(h)) / 3.
inline double delta_fd_richardson(Functional which, const CurveFn& u, const VariationFn& v, double t0, double t1,
                                  double h = 1e-3) {
    return (4.0 * delta_fd(which, u, v, t0, t1, h / 2) - delta_fd(which, u, v, t0, t1, h)) / 3.0;
}

/// Equivalent expressions of the first variation, after 0 to 3 integrations by parts.
enum class VariationForm {
    form5,   ///< int 2 u'' v''/u'^2 - 2 u''^2 v'/u'^3
    form6,   ///< int (-2 u'''/u'^2 + 2 u''^2/u'^3) v' + B0
    form7,   ///< int (-2 u'''/u' + 3 u''^2/u'^2) D_u(v)/u' + B1
    form8,   ///< int (2 u''''/u' + 6 u''^3/u'^3 - 8 u''' u''/u'^2) v/u' + B2
    form14,  ///< int S(u) D_u(v)/u' + B   (variation of I_S)
};

inline Functional functional_of(VariationForm f) { return f == VariationForm::form14 ? Functional::IS : Functional::IL; }

struct FormValue {
    double integral = 0.0;
    double boundary = 0.0;  ///< boundary term evaluated at t1 minus t0
    double total() const { return integral + boundary; }
};

inline FormValue delta_form(VariationForm form, const CurveFn& u, const VariationFn& v, double t0, double t1) {
    detail::check_window(u, t0, t1);
    const auto& bp = v.breakpoints();
    auto boundary = [&](auto&& term) { return term(u.jet(t1), v.at(t1)) - term(u.jet(t0), v.at(t0)); };
    FormValue out;
    switch (form) {
        case VariationForm::form5:
            out.integral = detail::quad(
                [&](double t) {
                    const Jet4 j = u.jet(t);
                    require_regular(j);
                    const VarJet w = v.at(t);
                    return 2.0 * j.q * w.v2 / (j.p * j.p) - 2.0 * j.q * j.q * w.v1 / (j.p * j.p * j.p);
                },
                t0, t1, bp);
            break;
        case VariationForm::form6:
            out.integral = detail::quad(
                [&](double t) {
                    const Jet4 j = u.jet(t);
                    require_regular(j);
                    return (-2.0 * j.r / (j.p * j.p) + 2.0 * j.q * j.q / (j.p * j.p * j.p)) * v.at(t).v1;
                },
                t0, t1, bp);
            out.boundary = boundary([](const Jet4& j, const VarJet& w) { return boundary_terms_thm1(j, w).b0; });
            break;
        case VariationForm::form7:
            out.integral = detail::quad(
                [&](double t) {
                    const Jet4 j = u.jet(t);
                    return (-2.0 * j.r / j.p + 3.0 * j.q * j.q / (j.p * j.p)) * d_u(j, v.at(t)) / j.p;
                },
                t0, t1, bp);
            out.boundary = boundary([](const Jet4& j, const VarJet& w) { return boundary_terms_thm1(j, w).b1; });
            break;
        case VariationForm::form8:
            out.integral = detail::quad(
                [&](double t) {
                    const auto d = u.derivatives(t);
                    const double p = d[1], q = d[2], r = d[3], u4 = d[4];
                    require_regular({t, d[0], p, q, r});
                    return (2.0 * u4 / p + 6.0 * q * q * q / (p * p * p) - 8.0 * r * q / (p * p)) * v(t).v / p;
                },
                t0, t1, bp);
            out.boundary = boundary([](const Jet4& j, const VarJet& w) { return boundary_terms_thm1(j, w).b2; });
            break;
        case VariationForm::form14:
            out.integral = detail::quad(
                [&](double t) {
                    const Jet4 j = u.jet(t);
                    return schwarzian(j) * d_u(j, v.at(t)) / j.p;
                },
                t0, t1, bp);
            out.boundary = boundary([](const Jet4& j, const VarJet& w) { return boundary_B(j, w); });
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solving D_u(v) = phi

/// v(t) = u'(t) (v0/u'(t0) + int_{t0}^t phi/u'), the solution of D_u(v) = phi with v(t0) = v0.
///
/// The running integral is tabulated on panels across the bump's support and
/// completed inside a panel by one 15-point Kronrod rule.
inline VariationFn solve_du(const CurveFn& u, const BumpFn& phi, double v0, double t0) {
    const double p0 = u.jet(t0).p;
    require_regular({t0, 0.0, p0, 0.0, 0.0}, kCurvePFloor);

    struct Table {
        double lo = 0.0, hi = 0.0;
        std::vector<double> edges, cumulative;
    };
    auto table = std::make_shared<Table>();
    table->lo = std::max(phi.lo(), t0);
    table->hi = std::max(phi.hi(), table->lo);
    auto integrand = [u, phi](double t) { return phi(t) / u.jet(t).p; };
    constexpr int panels = 128;
    table->edges.resize(panels + 1);
    table->cumulative.assign(panels + 1, 0.0);
    for (int i = 0; i <= panels; ++i) table->edges[i] = table->lo + (table->hi - table->lo) * i / panels;
    if (table->hi > table->lo) {
        for (int i = 0; i < panels; ++i) {
            table->cumulative[i + 1] =
                table->cumulative[i] + detail::gk15(integrand, table->edges[i], table->edges[i + 1]).value;
        }
    }

    auto running = [table, integrand](double t) -> double {
        if (t <= table->lo || table->hi <= table->lo) return 0.0;
        if (t >= table->hi) return table->cumulative.back();
        const double width = (table->hi - table->lo) / (table->edges.size() - 1);
        const auto i = std::min(static_cast<std::size_t>((t - table->lo) / width), table->edges.size() - 2);
        return table->cumulative[i] + detail::gk15(integrand, table->edges[i], t).value;
    };

    const double base = v0 / p0;
    return VariationFn(
        [u, phi, running, base](double t) {
            const auto d = u.derivatives(t);
            const double p = d[1], q = d[2], r = d[3], u4 = d[4];
            const auto f = phi.derivatives(t);
            const double I = base + running(t);
            VariationJet w;
            w.v = p * I;
            w.v1 = q * I + f[0];
            w.v2 = r * I + q * f[0] / p + f[1];
            w.v3 = u4 * I + 2.0 * r * f[0] / p + q * f[1] / p - q * q * f[0] / (p * p) + f[2];
            return w;
        },
        {phi.lo(), phi.hi()});
}

/// max |D_u(v) - phi| over `points` evenly spaced times of [t0, t1].
inline double solve_du_residual(const CurveFn& u, const VariationFn& v, const BumpFn& phi, double t0, double t1,
                                int points = 201) {
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double t = t0 + (t1 - t0) * i / (points - 1);
        worst = std::max(worst, std::abs(d_u(u.jet(t), v.at(t)) - phi(t)));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Extended variations

struct AdmissibleVariation {
    VariationFn v;             ///< v + c (t - t0 - eps)^2 on [t0, t0 + eps]
    VariationFn base;          ///< solution of D_u(v) = phi with v(t0) = 0
    double c = 0.0;            ///< parabola coefficient
    double eps = 0.0;
    double K = 0.0;            ///< max(|v_hat|, |D_u(v_hat)|) / eps on [t0, t0 + eps]
    double endpoint_residual = 0.0;  ///< |B(v)(t1) - B(v)(t0)|
};

/// Perturb the solution of D_u(v) = phi by a glued parabola near t0 so that
/// the boundary term B = (D_u^2(v) + S(u) v)/u' takes equal values at both ends.
inline AdmissibleVariation admissible_variation(const CurveFn& u, const BumpFn& phi, double eps) {
    const double t0 = u.t0(), t1 = u.t1();
    if (!(eps > 0.0) || !(phi.lo() > t0 + eps) || !(phi.hi() < t1)) {
        throw InvalidArgument("bump support must lie inside (t0 + eps, t1)");
    }
    AdmissibleVariation out{VariationFn::zero(), solve_du(u, phi, 0.0, t0)};
    out.eps = eps;

    const double join = t0 + eps;
    const Jet4 j0 = u.jet(t0), j1 = u.jet(t1);
    const double b_v = boundary_B(j1, out.base.at(t1)) - boundary_B(j0, out.base.at(t0));
    // Parabola w(t) = (t - t0 - eps)^2 vanishes at t1, so B(w)| = -B(w)(t0).
    const double b_w0 = boundary_B(j0, {eps * eps, -2.0 * eps, 2.0});
    if (!(std::abs(b_w0) > 1e-14)) throw InfeasibleError("endpoint condition is insensitive to the parabola");
    out.c = b_v / b_w0;

    const double c = out.c;
    VariationFn hat(
        [c, join](double t) {
            if (t >= join) return VariationJet{};
            const double x = t - join;
            return VariationJet{c * x * x, 2.0 * c * x, 2.0 * c, 0.0};
        },
        {join}, false);
    out.v = out.base + hat;

    double bound = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double t = t0 + eps * i / 100.0;
        const VarJet w = hat.at(t);
        bound = std::max({bound, std::abs(w.v), std::abs(d_u(u.jet(t), w))});
    }
    out.K = bound / eps;
    out.endpoint_residual = std::abs(boundary_B(j1, out.v.at(t1)) - boundary_B(j0, out.v.at(t0)));
    return out;
}

struct CriticalReport {
    std::string curve;
    double t0 = 0.0, t1 = 0.0;
    int n = 0;
    double max_delta = 0.0;
    double max_endpoint_residual = 0.0;
    double max_du_residual = 0.0;
    double max_K = 0.0;
    double eps = 0.0;
    std::optional<BumpFn> witness;
    double witness_delta = 0.0;
};

/// |delta I_S| above this marks the curve as not critical.
inline constexpr double kWitnessThreshold = 1e-4;

struct CriticalTestOptions {
    std::uint64_t seed = 1;
    double eps_fraction = 0.02;  ///< eps as a fraction of the interval length
};

/// Evaluate delta I_S (form14) over n random admissible variations built from bumps.
inline CriticalReport critical_test(const CurveFn& u, double t0, double t1, int n,
                                    const CriticalTestOptions& opts = {}) {
    if (n < 1) throw InvalidArgument("critical_test needs n >= 1");
    detail::check_window(u, t0, t1);
    const CurveFn window([u](double t) { return u.derivatives(t); }, t0, t1, u.label());

    CriticalReport rep;
    rep.curve = u.label();
    rep.t0 = t0;
    rep.t1 = t1;
    rep.n = n;
    const double L = t1 - t0;
    rep.eps = opts.eps_fraction * L;

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        BumpFn phi;
        phi.radius = L * (0.05 + 0.15 * unit(rng));
        const double lo = t0 + rep.eps + phi.radius + 0.01 * L;
        const double hi = t1 - phi.radius - 0.01 * L;
        phi.center = lo + (hi - lo) * unit(rng);
        phi.amplitude = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unit(rng));

        const AdmissibleVariation av = admissible_variation(window, phi, rep.eps);
        const double delta = delta_form(VariationForm::form14, window, av.v, t0, t1).total();
        rep.max_endpoint_residual = std::max(rep.max_endpoint_residual, av.endpoint_residual);
        rep.max_du_residual = std::max(rep.max_du_residual, solve_du_residual(window, av.base, phi, t0, t1));
        rep.max_K = std::max(rep.max_K, av.K);
        if (std::abs(delta) > rep.max_delta) {
            rep.max_delta = std::abs(delta);
            if (rep.max_delta > kWitnessThreshold) {
                rep.witness = phi;
                rep.witness_delta = delta;
            }
        }
    }
    return rep;
}

inline void to_json(nlohmann::json& j, const CriticalReport& r) {
    j = {{"u", r.curve},
         {"interval", {r.t0, r.t1}},
         {"n", r.n},
         {"max_delta", r.max_delta},
         {"witness", nullptr},
         {"eps", r.eps},
         {"max_endpoint_residual", r.max_endpoint_residual},
         {"max_du_residual", r.max_du_residual},
         {"K", r.max_K}};
    if (r.witness) {
        nlohmann::json w = *r.witness;
        w["delta"] = r.witness_delta;
        j["witness"] = w;
    }
}

}  // namespace schwarz
