#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mvs {

/// Largest ambient dimension handled anywhere in the library (3 space + 1 time).
inline constexpr int kMaxDim = 4;

/// Small fixed-capacity coordinate vector. Value type, no heap allocation.
class Point {
public:
    Point() = default;
    explicit Point(int dim) : dim_(dim) { assert(dim >= 0 && dim <= kMaxDim); }
    Point(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        assert(dim_ <= kMaxDim);
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }
    explicit Point(std::span<const double> xs) : dim_(static_cast<int>(xs.size())) {
        assert(dim_ <= kMaxDim);
        for (int i = 0; i < dim_; ++i) c_[i] = xs[i];
    }

    static Point zeros(int dim) { return Point(dim); }
    static Point unit(int dim, int axis) {
        Point p(dim);
        p[axis] = 1.0;
        return p;
    }

    int dim() const { return dim_; }
    double& operator[](int i) { return c_[i]; }
    double operator[](int i) const { return c_[i]; }
    const double* data() const { return c_.data(); }
    double* data() { return c_.data(); }

    std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

    Point& operator+=(const Point& o) {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Point& operator*=(double a) {
        for (int i = 0; i < dim_; ++i) c_[i] *= a;
        return *this;
    }

    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(double s, Point a) { return a *= s; }
    friend Point operator*(Point a, double s) { return a *= s; }
    friend Point operator-(Point a) { return a *= -1.0; }

    friend bool operator==(const Point& a, const Point& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

/// First `n` coordinates of `p`.
inline Point head(const Point& p, int n) {
    Point q(n);
    for (int i = 0; i < n; ++i) q[i] = p[i];
    return q;
}

/// `p` with one extra trailing coordinate.
inline Point append(const Point& p, double last) {
    Point q(p.dim() + 1);
    for (int i = 0; i < p.dim(); ++i) q[i] = p[i];
    q[p.dim()] = last;
    return q;
}

}  // namespace mvs
