#pragma once

#include <string>
#include <vector>

#include "mvs/point.hpp"

namespace mvs {

/// Bounded open set in R^N. Membership is exact for every supported kind.
class Domain {
public:
    enum class Kind { interval, box, ball, annulus };

    static Domain interval(double lo, double hi, double halo = 1.0);
    static Domain box(const Point& lo, const Point& hi, double halo = 1.0);
    static Domain ball(const Point& center, double radius, double halo = 1.0);
    static Domain annulus(const Point& center, double inner, double outer, double halo = 1.0);

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    int dim() const { return dim_; }
    double halo() const { return halo_; }

    bool contains(const Point& x) const;

    /// Axis-aligned bounding box of the closure.
    Point lower() const { return lo_; }
    Point upper() const { return hi_; }

    const Point& center() const { return center_; }
    double inner_radius() const { return r_in_; }
    double outer_radius() const { return r_out_; }

    /// sup over the closure of |x - x0|.
    double max_distance_from(const Point& x0) const;
    /// dist(x0, closure); zero when x0 lies in the closure.
    double min_distance_from(const Point& x0) const;

    /// Deterministic low-discrepancy points of the domain, at distance >= margin from
    /// the boundary when the kind allows an exact shrink.
    std::vector<Point> sample(int count, double margin = 0.0) const;

    /// Same set with a different halo radius.
    Domain with_halo(double halo) const;

private:
    Domain() = default;
    Kind kind_ = Kind::interval;
    int dim_ = 1;
    Point lo_, hi_, center_;
    double r_in_ = 0.0, r_out_ = 0.0;
    double halo_ = 1.0;
};

}  // namespace mvs
