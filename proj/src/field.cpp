#include "mvs/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvs/errors.hpp"

namespace mvs {

namespace {

constexpr double kSnap = 1e-9;
constexpr long kMaxLatticePoints = 50'000'000;

}  // namespace

ExteriorData ExteriorData::from(const TestFunction& tf, double sup_bound) {
    auto fn = std::make_shared<TestFunction>(tf);
    return ExteriorData([fn](const Point& x) { return fn->value(x); }, sup_bound, tf.id());
}

ExteriorData ExteriorData::constant(double c) {
    return ExteriorData([c](const Point&) { return c; }, std::fabs(c), "constant");
}

LatticeGrid::LatticeGrid(const Point& lower, const Point& upper, const Point& spacing, Predicate inside,
                         std::string description)
    : dim_(lower.dim()), h_(spacing), inside_(std::move(inside)), description_(std::move(description)) {
    if (upper.dim() != dim_ || spacing.dim() != dim_) throw GeometryError("lattice bounds and spacing disagree in dimension");
    long total = 1;
    for (int i = 0; i < dim_; ++i) {
        if (!(h_[i] > 0.0)) throw GeometryError("lattice spacing must be positive");
        klo_[i] = static_cast<long>(std::ceil(lower[i] / h_[i] - kSnap));
        const long khi = static_cast<long>(std::floor(upper[i] / h_[i] + kSnap));
        kcount_[i] = std::max(0L, khi - klo_[i] + 1);
        total *= kcount_[i];
        if (total > kMaxLatticePoints) throw GeometryError("lattice too fine for the domain");
    }
    index_map_.assign(total, -1);
    std::array<long, kMaxDim> k{};
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int i = dim_ - 1; i >= 0; --i) {
            k[i] = klo_[i] + rem % kcount_[i];
            rem /= kcount_[i];
        }
        const Point x = lattice_point(k);
        if (inside_(x)) {
            index_map_[flat] = static_cast<long>(nodes_.size());
            nodes_.push_back(x);
        }
    }
    if (nodes_.empty()) throw GeometryError("lattice has no interior nodes");
}

LatticeGrid LatticeGrid::over(const Domain& domain, double h) {
    const int n = domain.dim();
    Point sp(n);
    for (int i = 0; i < n; ++i) sp[i] = h;
    std::ostringstream os;
    os << domain.kind_name() << " lattice h=" << h;
    return LatticeGrid(domain.lower(), domain.upper(), sp, [domain](const Point& x) { return domain.contains(x); },
                       os.str());
}

LatticeGrid LatticeGrid::over_cylinder(const Domain& domain, double T, double h, double ht) {
    if (!(T > 0.0 && ht > 0.0)) throw GeometryError("time horizon and step must be positive");
    const int n = domain.dim();
    Point sp(n + 1), lo = append(domain.lower(), 0.0), hi = append(domain.upper(), T);
    for (int i = 0; i < n; ++i) sp[i] = h;
    sp[n] = ht;
    std::ostringstream os;
    os << domain.kind_name() << " x (0," << T << "] lattice h=" << h << " ht=" << ht;
    return LatticeGrid(lo, hi, sp,
                       [domain, n, T](const Point& x) {
                           return x[n] > 0.0 && x[n] <= T * (1.0 + 1e-12) && domain.contains(head(x, n));
                       },
                       os.str());
}

long LatticeGrid::slot(const std::array<long, kMaxDim>& k) const {
    long flat = 0;
    for (int i = 0; i < dim_; ++i) {
        const long r = k[i] - klo_[i];
        if (r < 0 || r >= kcount_[i]) return -1;
        flat = flat * kcount_[i] + r;
    }
    return index_map_[flat];
}

Point LatticeGrid::lattice_point(const std::array<long, kMaxDim>& k) const {
    Point x(dim_);
    for (int i = 0; i < dim_; ++i) x[i] = static_cast<double>(k[i]) * h_[i];
    return x;
}

LatticeField::LatticeField(std::shared_ptr<const LatticeGrid> grid, std::shared_ptr<const ExteriorData> exterior,
                           std::vector<double> values)
    : grid_(std::move(grid)), exterior_(std::move(exterior)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) throw GeometryError("field values do not match the lattice");
}

LatticeField LatticeField::filled(std::shared_ptr<const LatticeGrid> grid,
                                  std::shared_ptr<const ExteriorData> exterior, double c) {
    std::vector<double> v(grid->size(), c);
    return LatticeField(std::move(grid), std::move(exterior), std::move(v));
}

LatticeField LatticeField::sampled(std::shared_ptr<const LatticeGrid> grid,
                                   std::shared_ptr<const ExteriorData> exterior, const FieldEval& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
    return LatticeField(std::move(grid), std::move(exterior), std::move(v));
}

std::vector<InterpolationWeight> LatticeField::weights(const Point& x) const {
    std::vector<InterpolationWeight> out;
    const LatticeGrid& g = *grid_;
    if (!g.inside(x)) return out;
    const int n = g.dim();
    std::array<long, kMaxDim> k0{};
    std::array<double, kMaxDim> frac{};
    for (int i = 0; i < n; ++i) {
        const double t = x[i] / g.spacing()[i];
        const double r = std::round(t);
        if (std::fabs(t - r) < kSnap) {
            k0[i] = static_cast<long>(r);
            frac[i] = 0.0;
        } else {
            k0[i] = static_cast<long>(std::floor(t));
            frac[i] = t - static_cast<double>(k0[i]);
        }
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
        double w = 1.0;
        std::array<long, kMaxDim> k = k0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) {
                w *= frac[i];
                ++k[i];
            } else {
                w *= 1.0 - frac[i];
            }
        }
        if (w == 0.0) continue;
        out.push_back({g.lattice_point(k), g.slot(k), w});
    }
    return out;
}

double LatticeField::evaluate(const Point& x) const {
    const LatticeGrid& g = *grid_;
    if (!g.inside(x)) return exterior_->g(x);
    const int n = g.dim();
    std::array<long, kMaxDim> k0{};
    std::array<double, kMaxDim> frac{};
    bool on_node = true;
    for (int i = 0; i < n; ++i) {
        const double t = x[i] / g.spacing()[i];
        const double r = std::round(t);
        if (std::fabs(t - r) < kSnap) {
            k0[i] = static_cast<long>(r);
            frac[i] = 0.0;
        } else {
            k0[i] = static_cast<long>(std::floor(t));
            frac[i] = t - static_cast<double>(k0[i]);
            on_node = false;
        }
    }
    auto corner_value = [&](const std::array<long, kMaxDim>& k) {
        const long s = g.slot(k);
        return s >= 0 ? values_[s] : exterior_->g(g.lattice_point(k));
    };
    if (on_node) return corner_value(k0);
    double acc = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        double w = 1.0;
        std::array<long, kMaxDim> k = k0;
        for (int i = 0; i < n && w != 0.0; ++i) {
            if (mask & (1 << i)) {
                w *= frac[i];
                ++k[i];
            } else {
                w *= 1.0 - frac[i];
            }
        }
        if (w != 0.0) acc += w * corner_value(k);
    }
    return acc;
}

FieldEval LatticeField::as_eval() const {
    auto self = std::make_shared<LatticeField>(*this);
    return [self](const Point& x) { return self->evaluate(x); };
}

LatticeField LatticeField::with_values(std::vector<double> values) const {
    return LatticeField(grid_, exterior_, std::move(values));
}

double LatticeField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace mvs
