#pragma once

#include <array>
#include <cmath>

namespace mvs {

/// Truncated Taylor series t -> sum_k c[k] t^k, k <= 4.
struct Jet {
    static constexpr int kOrder = 4;
    std::array<double, kOrder + 1> c{};

    static Jet constant(double a) {
        Jet j;
        j.c[0] = a;
        return j;
    }
    static Jet linear(double a, double b) {
        Jet j;
        j.c[0] = a;
        j.c[1] = b;
        return j;
    }

    /// k-th derivative at t = 0.
    double derivative(int k) const {
        static constexpr double fact[] = {1.0, 1.0, 2.0, 6.0, 24.0};
        return c[k] * fact[k];
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= kOrder; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= kOrder; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(double a) {
        for (double& x : c) x *= a;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= kOrder; ++k)
            for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
        return r;
    }
};

inline Jet exp(const Jet& a) {
    Jet e;
    e.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= Jet::kOrder; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
        e.c[k] = s / k;
    }
    return e;
}

inline Jet log(const Jet& a) {
    Jet l;
    l.c[0] = std::log(a.c[0]);
    for (int k = 1; k <= Jet::kOrder; ++k) {
        double s = 0.0;
        for (int j = 1; j < k; ++j) s += j * l.c[j] * a.c[k - j];
        l.c[k] = (a.c[k] - s / k) / a.c[0];
    }
    return l;
}

/// a^q for a.c[0] > 0.
inline Jet pow(const Jet& a, double q) { return exp(log(a) * q); }

inline Jet sin(const Jet& a) {
    Jet s, co;
    s.c[0] = std::sin(a.c[0]);
    co.c[0] = std::cos(a.c[0]);
    for (int k = 1; k <= Jet::kOrder; ++k) {
        double ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += j * a.c[j] * co.c[k - j];
            cc += j * a.c[j] * s.c[k - j];
        }
        s.c[k] = ss / k;
        co.c[k] = -cc / k;
    }
    return s;
}

}  // namespace mvs
