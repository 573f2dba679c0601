#pragma once

// Closed-form solutions of the fourth-order Euler-Lagrange equation:
// u = (A g + B)/(C g + D) with g = exp(a t), t or tan(w t) according to the
// sign of the constant Schwarzian sigma.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "jet.hpp"
#include "schwarzian.hpp"
#include "taylor.hpp"

namespace schwarz {

enum class FamilyClass { hyperbolic, parabolic, elliptic };

inline const char* to_string(FamilyClass c) {
    switch (c) {
        case FamilyClass::hyperbolic: return "hyperbolic";
        case FamilyClass::parabolic: return "parabolic";
        case FamilyClass::elliptic: return "elliptic";
    }
    return "?";
}

class MobiusFamily {
public:
    /// Throws InvalidArgument when AD - BC vanishes.
    MobiusFamily(double A, double B, double C, double D, double sigma) : A_(A), B_(B), C_(C), D_(D), sigma_(sigma) {
        const double det = A * D - B * C;
        const double scale = std::abs(A * D) + std::abs(B * C);
        if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det) || !std::isfinite(sigma)) {
            throw InvalidArgument("degenerate Moebius parameters: AD - BC = " + std::to_string(det));
        }
    }

    /// u = g itself.
    static MobiusFamily identity(double sigma) { return {1.0, 0.0, 0.0, 1.0, sigma}; }

    double A() const noexcept { return A_; }
    double B() const noexcept { return B_; }
    double C() const noexcept { return C_; }
    double D() const noexcept { return D_; }
    double sigma() const noexcept { return sigma_; }
    double determinant() const noexcept { return A_ * D_ - B_ * C_; }

    FamilyClass family_class() const noexcept {
        if (sigma_ < 0.0) return FamilyClass::hyperbolic;
        if (sigma_ > 0.0) return FamilyClass::elliptic;
        return FamilyClass::parabolic;
    }

    /// Rate a with S(e^{a t}) = -a^2/2 = sigma (hyperbolic class).
    double exp_rate() const { return std::sqrt(-2.0 * sigma_); }
    /// Frequency w with S(tan(w t)) = 2 w^2 = sigma (elliptic class).
    double tan_frequency() const { return std::sqrt(sigma_ / 2.0); }

private:
    double A_, B_, C_, D_, sigma_;
};

inline void to_json(nlohmann::json& j, const MobiusFamily& f) {
    j = nlohmann::json{{"A", f.A()}, {"B", f.B()}, {"C", f.C()}, {"D", f.D()}, {"sigma", f.sigma()}};
}

inline MobiusFamily family_from_json(const nlohmann::json& j) {
    return {j.at("A").get<double>(), j.at("B").get<double>(), j.at("C").get<double>(), j.at("D").get<double>(),
            j.at("sigma").get<double>()};
}

namespace detail {

inline constexpr double kSingularTimeTol = 1e-12;

// Numerator and denominator series of the closed form at t.
// The elliptic class is written as (A sin + B cos)/(C sin + D cos) so that
// tan poles with C != 0 (where u stays finite) do not count as singular.
inline std::array<TaylorScalar, 2> family_series(const MobiusFamily& f, double t, int order) {
    const TaylorScalar T = TaylorScalar::identity(t, order);
    switch (f.family_class()) {
        case FamilyClass::parabolic:
            return {f.A() * T + f.B(), f.C() * T + f.D()};
        case FamilyClass::hyperbolic: {
            const TaylorScalar g = exp(f.exp_rate() * T);
            return {f.A() * g + f.B(), f.C() * g + f.D()};
        }
        case FamilyClass::elliptic: {
            const auto [s, c] = sincos(f.tan_frequency() * T);
            return {f.A() * s + f.B() * c, f.C() * s + f.D() * c};
        }
    }
    return {};
}

inline double denominator_scale(const MobiusFamily& f, double t) {
    switch (f.family_class()) {
        case FamilyClass::parabolic: return std::abs(f.C() * t) + std::abs(f.D());
        case FamilyClass::hyperbolic: return std::abs(f.C() * std::exp(f.exp_rate() * t)) + std::abs(f.D());
        case FamilyClass::elliptic: {
            const double th = f.tan_frequency() * t;
            return std::abs(f.C() * std::sin(th)) + std::abs(f.D() * std::cos(th));
        }
    }
    return 1.0;
}

}  // namespace detail

/// u, u', u'', u''', u'''' at t by exact series differentiation of the closed form.
inline std::array<double, 5> family_derivatives(const MobiusFamily& f, double t) {
    auto [num, den] = detail::family_series(f, t, 4);
    if (std::abs(den.value()) <= detail::kSingularTimeTol * std::max(1.0, detail::denominator_scale(f, t))) {
        throw SingularTimeError("closed-form solution is singular at t = " + std::to_string(t));
    }
    const TaylorScalar u = num / den;
    return {u.derivative(0), u.derivative(1), u.derivative(2), u.derivative(3), u.derivative(4)};
}

inline Jet4 family_eval_jet(const MobiusFamily& f, double t) {
    const auto d = family_derivatives(f, t);
    return {t, d[0], d[1], d[2], d[3]};
}

/// Poles of the closed form in [t0, t1], ascending.
inline std::vector<double> family_singularities(const MobiusFamily& f, double t0, double t1) {
    if (!(t0 < t1)) throw InvalidArgument("family_singularities needs t0 < t1");
    std::vector<double> out;
    const double C = f.C(), D = f.D();
    switch (f.family_class()) {
        case FamilyClass::parabolic:
            if (C != 0.0) out.push_back(-D / C);
            break;
        case FamilyClass::hyperbolic:
            if (C != 0.0 && -D / C > 0.0) out.push_back(std::log(-D / C) / f.exp_rate());
            break;
        case FamilyClass::elliptic: {
            // C sin(th) + D cos(th) = 0  <=>  th = atan2(-D, C) + k pi
            const double w = f.tan_frequency();
            const double th0 = std::atan2(-D, C);
            const double pi = std::numbers::pi;
            const double kmin = std::ceil((w * t0 - th0) / pi - 1e-9);
            const double kmax = std::floor((w * t1 - th0) / pi + 1e-9);
            for (double k = kmin; k <= kmax; k += 1.0) out.push_back((th0 + k * pi) / w);
            break;
        }
    }
    std::erase_if(out, [&](double s) { return s < t0 || s > t1; });
    std::sort(out.begin(), out.end());
    return out;
}

struct FamilyResiduals {
    double max_schwarzian = 0.0;  ///< max |S(jet) - sigma| / max(1, |sigma|)
    double max_el = 0.0;          ///< max |u - el_rhs(jet)| / max(1, |u|)
    int samples = 0;              ///< samples actually evaluated
    int skipped = 0;              ///< samples dropped for lying next to a pole
};

/// Check the closed form against its defining properties on `samples` evenly
/// spaced times. Times within 1e-3 of the interval length from a pole are skipped.
inline FamilyResiduals family_verify(const MobiusFamily& f, int samples, double t0, double t1) {
    if (samples < 1) throw InvalidArgument("family_verify needs at least one sample");
    if (samples > 1 && !(t0 < t1)) throw InvalidArgument("family_verify needs t0 < t1");
    const double guard = 1e-3 * std::max(t1 - t0, 1e-12);
    const std::vector<double> poles =
        samples > 1 ? family_singularities(f, t0 - guard, t1 + guard) : std::vector<double>{};
    FamilyResiduals res;
    for (int i = 0; i < samples; ++i) {
        const double t = samples == 1 ? t0 : t0 + (t1 - t0) * i / (samples - 1);
        if (std::any_of(poles.begin(), poles.end(), [&](double s) { return std::abs(t - s) < guard; })) {
            ++res.skipped;
            continue;
        }
        const auto d = family_derivatives(f, t);
        const Jet4 j{t, d[0], d[1], d[2], d[3]};
        ++res.samples;
        res.max_schwarzian =
            std::max(res.max_schwarzian, std::abs(schwarzian(j) - f.sigma()) / std::max(1.0, std::abs(f.sigma())));
        res.max_el = std::max(res.max_el, std::abs(d[4] - el_rhs(j)) / std::max(1.0, std::abs(d[4])));
    }
    return res;
}

}  // namespace schwarz
