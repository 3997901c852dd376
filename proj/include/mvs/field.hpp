#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mvs/domain.hpp"
#include "mvs/point.hpp"
#include "mvs/test_function.hpp"

namespace mvs {

using FieldEval = std::function<double(const Point&)>;

/// Dirichlet datum on the complement of the domain.
struct ExteriorData {
    FieldEval g;
    double bound = 0.0;
    std::string id = "custom";

    ExteriorData() = default;
    ExteriorData(FieldEval fn, double sup_bound, std::string name = "custom")
        : g(std::move(fn)), bound(sup_bound), id(std::move(name)) {}

    static ExteriorData from(const TestFunction& tf, double sup_bound);
    static ExteriorData constant(double c);

    double operator()(const Point& x) const { return g(x); }
};

/// Regular lattice origin + k*h restricted to an open region. Only nodes inside the
/// region carry unknowns; the rest of the lattice is exterior.
class LatticeGrid {
public:
    using Predicate = std::function<bool(const Point&)>;

    LatticeGrid(const Point& lower, const Point& upper, const Point& spacing, Predicate inside,
                std::string description);

    static LatticeGrid over(const Domain& domain, double h);
    /// Space-time cylinder domain x (0, T]; time is the last coordinate.
    static LatticeGrid over_cylinder(const Domain& domain, double T, double h, double ht);

    int dim() const { return dim_; }
    const Point& spacing() const { return h_; }
    std::size_t size() const { return nodes_.size(); }
    const Point& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Point>& nodes() const { return nodes_; }
    bool inside(const Point& x) const { return inside_(x); }
    const std::string& description() const { return description_; }

    /// Slot of lattice index k, or -1 when the lattice point is exterior.
    long slot(const std::array<long, kMaxDim>& k) const;
    Point lattice_point(const std::array<long, kMaxDim>& k) const;

private:
    int dim_;
    Point h_;
    Predicate inside_;
    std::string description_;
    std::array<long, kMaxDim> klo_{}, kcount_{};
    std::vector<long> index_map_;
    std::vector<Point> nodes_;
};

struct InterpolationWeight {
    Point corner;
    long slot;  // -1 for exterior corners
    double weight;
};

/// Node values inside the domain plus the exterior datum everywhere else.
class LatticeField {
public:
    LatticeField(std::shared_ptr<const LatticeGrid> grid, std::shared_ptr<const ExteriorData> exterior,
                 std::vector<double> values);

    static LatticeField filled(std::shared_ptr<const LatticeGrid> grid, std::shared_ptr<const ExteriorData> exterior,
                               double c);
    static LatticeField sampled(std::shared_ptr<const LatticeGrid> grid,
                                std::shared_ptr<const ExteriorData> exterior, const FieldEval& fn);

    double evaluate(const Point& x) const;
    double operator()(const Point& x) const { return evaluate(x); }
    FieldEval as_eval() const;

    /// Multilinear weights used by `evaluate` at an interior point; empty for exterior points.
    std::vector<InterpolationWeight> weights(const Point& x) const;

    LatticeField with_values(std::vector<double> values) const;

    const LatticeGrid& grid() const { return *grid_; }
    std::shared_ptr<const LatticeGrid> grid_ptr() const { return grid_; }
    const ExteriorData& exterior() const { return *exterior_; }
    std::shared_ptr<const ExteriorData> exterior_ptr() const { return exterior_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double sup_norm() const;

private:
    std::shared_ptr<const LatticeGrid> grid_;
    std::shared_ptr<const ExteriorData> exterior_;
    std::vector<double> values_;
};

}  // namespace mvs
