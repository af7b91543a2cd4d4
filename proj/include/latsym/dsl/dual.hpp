#pragma once

#include <cmath>

namespace latsym::dsl {

/// Forward-mode dual number carrying one directional derivative.
///
/// Nesting (Dual<Dual<double>>) yields exact second derivatives, which the
/// continuum module uses for u_xx, u_xt and u_tt.
template <class T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(double value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
    Dual(T value, T deriv) : v(value), d(deriv) {}

    Dual operator-() const { return {-v, -d}; }

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) {
        d = (d * o.v - v * o.d) / (o.v * o.v);
        v /= o.v;
        return *this;
    }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
    friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.v); }

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, e * a.d};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.v), cos(a.v) * a.d};
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.v), -(sin(a.v) * a.d)};
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return {s, a.d / (T(2.0) * s)};
}

template <class T>
Dual<T> abs(const Dual<T>& a) {
    using std::abs;
    return primal(a.v) < 0.0 ? -a : a;
}

/// a^e for an exponent that carries no derivative.
inline double pow_const(double a, double e) { return std::pow(a, e); }

template <class T>
Dual<T> pow_const(const Dual<T>& a, double e) {
    if (e == 0.0) return Dual<T>(1.0);
    if (e == 1.0) return a;
    return {pow_const(a.v, e), T(e) * pow_const(a.v, e - 1.0) * a.d};
}

}  // namespace latsym::dsl
