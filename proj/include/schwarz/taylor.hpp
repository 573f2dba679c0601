#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace schwarz {

/// Truncated power series in (t - base) of fixed order N.
///
/// Coefficient k is f^(k)(base) / k!. All arithmetic is exact up to the
/// truncation order; binary operations require identical base point and order.
class TaylorScalar {
public:
    TaylorScalar() : coeffs_(1, 0.0) {}

    /// Constant series.
    TaylorScalar(double value, double base, int order) : base_(base), coeffs_(checked_len(order), 0.0) {
        coeffs_[0] = value;
    }

    TaylorScalar(double base, std::vector<double> coeffs) : base_(base), coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw InvalidArgument("TaylorScalar needs at least one coefficient");
    }

    /// The series of t itself: base + (t - base).
    static TaylorScalar identity(double base, int order) {
        TaylorScalar s(base, base, order);
        if (order >= 1) s.coeffs_[1] = 1.0;
        return s;
    }

    double base_point() const noexcept { return base_; }
    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    double value() const noexcept { return coeffs_[0]; }
    double operator[](std::size_t k) const { return coeffs_[k]; }
    double& operator[](std::size_t k) { return coeffs_[k]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    /// k-th derivative at the base point, k! * c_k.
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f * coeffs_.at(static_cast<std::size_t>(k));
    }

    /// Termwise derivative. The top coefficient becomes 0 (unknown beyond order).
    TaylorScalar differentiated() const {
        TaylorScalar d(0.0, base_, order());
        for (int k = 0; k < order(); ++k) d.coeffs_[k] = (k + 1) * coeffs_[k + 1];
        return d;
    }

    /// Same series truncated (or zero-extended) to `order`.
    TaylorScalar with_order(int order) const {
        TaylorScalar s(0.0, base_, order);
        for (int k = 0; k <= order && k <= this->order(); ++k) s.coeffs_[k] = coeffs_[k];
        return s;
    }

    /// Sum of c_k * h^k.
    double evaluate(double h) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * h + *it;
        return acc;
    }

    TaylorScalar operator-() const {
        TaylorScalar s = *this;
        for (double& c : s.coeffs_) c = -c;
        return s;
    }

    TaylorScalar& operator+=(const TaylorScalar& o) {
        check_compatible(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    TaylorScalar& operator-=(const TaylorScalar& o) {
        check_compatible(o);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    TaylorScalar& operator*=(double s) {
        for (double& c : coeffs_) c *= s;
        return *this;
    }
    TaylorScalar& operator+=(double s) {
        coeffs_[0] += s;
        return *this;
    }

    friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b) { return a += b; }
    friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b) { return a -= b; }
    friend TaylorScalar operator*(TaylorScalar a, double s) { return a *= s; }
    friend TaylorScalar operator*(double s, TaylorScalar a) { return a *= s; }
    friend TaylorScalar operator+(TaylorScalar a, double s) { return a += s; }
    friend TaylorScalar operator+(double s, TaylorScalar a) { return a += s; }

    /// Cauchy product.
    friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
        a.check_compatible(b);
        const int n = a.order();
        TaylorScalar c(0.0, a.base_, n);
        for (int k = 0; k <= n; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += a.coeffs_[j] * b.coeffs_[k - j];
            c.coeffs_[k] = acc;
        }
        return c;
    }

    friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b) {
        a.check_compatible(b);
        if (b.coeffs_[0] == 0.0) throw DomainError("division by zero");
        const int n = a.order();
        TaylorScalar c(0.0, a.base_, n);
        for (int k = 0; k <= n; ++k) {
            double acc = a.coeffs_[k];
            for (int j = 1; j <= k; ++j) acc -= b.coeffs_[j] * c.coeffs_[k - j];
            c.coeffs_[k] = acc / b.coeffs_[0];
        }
        return c;
    }

    friend bool operator==(const TaylorScalar&, const TaylorScalar&) = default;

    void check_compatible(const TaylorScalar& o) const {
        if (o.base_ != base_ || o.coeffs_.size() != coeffs_.size()) {
            throw SeriesMismatchError("series mismatch: base " + std::to_string(base_) + "/" +
                                      std::to_string(o.base_) + ", order " + std::to_string(order()) + "/" +
                                      std::to_string(o.order()));
        }
    }

private:
    static std::size_t checked_len(int order) {
        if (order < 0) throw InvalidArgument("negative series order");
        return static_cast<std::size_t>(order) + 1;
    }

    double base_ = 0.0;
    std::vector<double> coeffs_;
};

/// a^n for integer n (negative n goes through the reciprocal).
inline TaylorScalar pow(const TaylorScalar& a, int n) {
    TaylorScalar one(1.0, a.base_point(), a.order());
    if (n == 0) return one;
    TaylorScalar base = n > 0 ? a : one / a;
    unsigned m = n > 0 ? static_cast<unsigned>(n) : static_cast<unsigned>(-static_cast<long>(n));
    TaylorScalar acc = one;
    while (m) {
        if (m & 1u) acc = acc * base;
        m >>= 1;
        if (m) base = base * base;
    }
    return acc;
}

// Elementary functions via the standard first-order recurrences:
// f' = g(f) a'  =>  k f_k = sum_{j=1..k} j a_j g_{k-j}.

inline TaylorScalar exp(const TaylorScalar& a) {
    const int n = a.order();
    TaylorScalar e(std::exp(a[0]), a.base_point(), n);
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a[j] * e[k - j];
        e[k] = acc / k;
    }
    return e;
}

inline TaylorScalar log(const TaylorScalar& a) {
    if (!(a[0] > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(a[0]));
    const int n = a.order();
    TaylorScalar l(std::log(a[0]), a.base_point(), n);
    for (int k = 1; k <= n; ++k) {
        double acc = a[k];
        for (int j = 1; j < k; ++j) acc -= (static_cast<double>(j) / k) * l[j] * a[k - j];
        l[k] = acc / a[0];
    }
    return l;
}

struct SinCos {
    TaylorScalar sin;
    TaylorScalar cos;
};

inline SinCos sincos(const TaylorScalar& a) {
    const int n = a.order();
    TaylorScalar s(std::sin(a[0]), a.base_point(), n);
    TaylorScalar c(std::cos(a[0]), a.base_point(), n);
    for (int k = 1; k <= n; ++k) {
        double as = 0.0;
        double ac = 0.0;
        for (int j = 1; j <= k; ++j) {
            as += j * a[j] * c[k - j];
            ac -= j * a[j] * s[k - j];
        }
        s[k] = as / k;
        c[k] = ac / k;
    }
    return {s, c};
}

inline TaylorScalar sin(const TaylorScalar& a) { return sincos(a).sin; }
inline TaylorScalar cos(const TaylorScalar& a) { return sincos(a).cos; }

/// Poles are rejected when |cos(a_0)| falls below this.
inline constexpr double kTanPoleTol = 1e-12;

inline TaylorScalar tan(const TaylorScalar& a) {
    if (std::abs(std::cos(a[0])) < kTanPoleTol) throw DomainError("tan at a pole");
    const int n = a.order();
    TaylorScalar t(std::tan(a[0]), a.base_point(), n);
    // w = 1 + tan^2, built incrementally alongside t.
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    w[0] = 1.0 + t[0] * t[0];
    for (int k = 1; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += j * a[j] * w[k - j];
        t[k] = acc / k;
        double wk = 0.0;
        for (int i = 0; i <= k; ++i) wk += t[i] * t[k - i];
        w[k] = wk;
    }
    return t;
}

}  // namespace schwarz
