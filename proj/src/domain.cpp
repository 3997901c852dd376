#include "mvs/domain.hpp"

#include <algorithm>
#include <cmath>

#include "mvs/errors.hpp"

namespace mvs {

namespace {

double radical_inverse(int index, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * (index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

constexpr int kPrimes[kMaxDim] = {2, 3, 5, 7};

void check_halo(double halo) {
    if (!(halo > 0.0)) throw GeometryError("halo radius must be positive");
}

}  // namespace

Domain Domain::interval(double lo, double hi, double halo) {
    if (!(hi > lo)) throw GeometryError("interval must satisfy lo < hi");
    check_halo(halo);
    Domain d;
    d.kind_ = Kind::interval;
    d.dim_ = 1;
    d.lo_ = Point{lo};
    d.hi_ = Point{hi};
    d.center_ = Point{0.5 * (lo + hi)};
    d.halo_ = halo;
    return d;
}

Domain Domain::box(const Point& lo, const Point& hi, double halo) {
    if (lo.dim() != hi.dim() || lo.dim() < 1) throw GeometryError("box corners must share a dimension");
    for (int i = 0; i < lo.dim(); ++i)
        if (!(hi[i] > lo[i])) throw GeometryError("box must satisfy lo < hi on every axis");
    check_halo(halo);
    Domain d;
    d.kind_ = lo.dim() == 1 ? Kind::interval : Kind::box;
    d.dim_ = lo.dim();
    d.lo_ = lo;
    d.hi_ = hi;
    d.center_ = 0.5 * (lo + hi);
    d.halo_ = halo;
    return d;
}

Domain Domain::ball(const Point& center, double radius, double halo) {
    if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
    check_halo(halo);
    Domain d;
    d.kind_ = Kind::ball;
    d.dim_ = center.dim();
    d.center_ = center;
    d.r_out_ = radius;
    d.lo_ = d.hi_ = center;
    for (int i = 0; i < d.dim_; ++i) {
        d.lo_[i] -= radius;
        d.hi_[i] += radius;
    }
    d.halo_ = halo;
    return d;
}

Domain Domain::annulus(const Point& center, double inner, double outer, double halo) {
    if (!(inner > 0.0 && outer > inner)) throw GeometryError("annulus needs 0 < inner < outer");
    Domain d = ball(center, outer, halo);
    d.kind_ = Kind::annulus;
    d.r_in_ = inner;
    return d;
}

std::string Domain::kind_name() const {
    switch (kind_) {
        case Kind::interval: return "interval";
        case Kind::box: return "box";
        case Kind::ball: return "ball";
        case Kind::annulus: return "annulus";
    }
    return "unknown";
}

bool Domain::contains(const Point& x) const {
    switch (kind_) {
        case Kind::interval:
        case Kind::box:
            for (int i = 0; i < dim_; ++i)
                if (!(x[i] > lo_[i] && x[i] < hi_[i])) return false;
            return true;
        case Kind::ball: return norm2(x - center_) < r_out_ * r_out_;
        case Kind::annulus: {
            const double r2 = norm2(x - center_);
            return r2 < r_out_ * r_out_ && r2 > r_in_ * r_in_;
        }
    }
    return false;
}

double Domain::max_distance_from(const Point& x0) const {
    if (kind_ == Kind::ball || kind_ == Kind::annulus) return norm(x0 - center_) + r_out_;
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const double d = std::max(std::fabs(x0[i] - lo_[i]), std::fabs(x0[i] - hi_[i]));
        s += d * d;
    }
    return std::sqrt(s);
}

double Domain::min_distance_from(const Point& x0) const {
    if (kind_ == Kind::ball || kind_ == Kind::annulus) {
        const double d = norm(x0 - center_);
        if (d >= r_out_) return d - r_out_;
        if (kind_ == Kind::annulus && d <= r_in_) return r_in_ - d;
        return 0.0;
    }
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const double d = std::max({lo_[i] - x0[i], 0.0, x0[i] - hi_[i]});
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<Point> Domain::sample(int count, double margin) const {
    std::vector<Point> out;
    out.reserve(count);
    if (count <= 0) return out;
    if (dim_ == 1) {
        const double a = lo_[0] + margin, b = hi_[0] - margin;
        if (!(b > a)) throw GeometryError("sampling margin exceeds the interval");
        for (int k = 0; k < count; ++k) out.push_back(Point{a + (b - a) * (k + 0.5) / count});
        return out;
    }
    auto inside = [&](const Point& x) {
        switch (kind_) {
            case Kind::interval:
            case Kind::box:
                for (int i = 0; i < dim_; ++i)
                    if (!(x[i] > lo_[i] + margin && x[i] < hi_[i] - margin)) return false;
                return true;
            case Kind::ball: return norm(x - center_) < r_out_ - margin;
            case Kind::annulus: {
                const double r = norm(x - center_);
                return r < r_out_ - margin && r > r_in_ + margin;
            }
        }
        return false;
    };
    for (int index = 1; static_cast<int>(out.size()) < count; ++index) {
        if (index > 1000000) throw GeometryError("sampling margin leaves no interior points");
        Point x(dim_);
        for (int i = 0; i < dim_; ++i) x[i] = lo_[i] + (hi_[i] - lo_[i]) * radical_inverse(index, kPrimes[i]);
        if (inside(x)) out.push_back(x);
    }
    return out;
}

Domain Domain::with_halo(double halo) const {
    check_halo(halo);
    Domain d = *this;
    d.halo_ = halo;
    return d;
}

}  // namespace mvs
