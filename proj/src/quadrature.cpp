#include "mvs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvs/errors.hpp"
#include "mvs/gauss.hpp"
#include "mvs/special.hpp"

namespace mvs {

namespace {

using special::kPi;

// Unit vectors with nonnegative weights summing to 1, symmetric under x -> -x.
void sphere_rule(int dim, int angular, std::vector<Point>& dirs, std::vector<double>& w) {
    dirs.clear();
    w.clear();
    if (dim == 1) {
        dirs = {Point{-1.0}, Point{1.0}};
        w = {0.5, 0.5};
    } else if (dim == 2) {
        const int m = std::max(2, angular + (angular & 1));
        for (int k = 0; k < m; ++k) {
            const double a = 2.0 * kPi * k / m;
            dirs.push_back(Point{std::cos(a), std::sin(a)});
            w.push_back(1.0 / m);
        }
    } else if (dim == 3) {
        const int m = std::max(2, angular + (angular & 1));
        const int nt = std::max(2, m / 2);
        const Rule1D gl = gauss_legendre(nt, -1.0, 1.0);
        for (int i = 0; i < nt; ++i) {
            const double c = gl.nodes[i], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int k = 0; k < m; ++k) {
                const double a = 2.0 * kPi * k / m;
                dirs.push_back(Point{sn * std::cos(a), sn * std::sin(a), c});
                w.push_back(0.5 * gl.weights[i] / m);
            }
        }
    } else {
        throw ConfigError("ball and annulus rules support dimensions 1 to 3");
    }
}

std::vector<Point> fibonacci_sphere(int count) {
    std::vector<Point> pts;
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = 2.0 * kPi * k / golden;
        pts.push_back(Point{r * std::cos(a), r * std::sin(a), z});
    }
    return pts;
}

void normalize(std::vector<double>& w) {
    const long double total = std::accumulate(w.begin(), w.end(), 0.0L);
    for (double& x : w) x = static_cast<double>(x / total);
}

std::vector<Point> lattice_ball_points(const Point& h, double r) {
    const int n = h.dim();
    for (int i = 1; i < n; ++i)
        if (std::fabs(h[i] - h[0]) > 1e-12 * h[0]) throw ConfigError("lattice ball rule needs equal spacing on every axis");
    const long m = static_cast<long>(std::floor(r / h[0] + 1e-9));
    std::vector<Point> pts;
    std::array<long, kMaxDim> k{};
    const long side = 2 * m + 1;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= side;
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int i = n - 1; i >= 0; --i) {
            k[i] = rem % side - m;
            rem /= side;
        }
        Point z(n);
        for (int i = 0; i < n; ++i) z[i] = static_cast<double>(k[i]) * h[i];
        if (norm2(z) <= r * r * (1.0 + 1e-12)) pts.push_back(z);
    }
    return pts;
}

}  // namespace

BallRule BallRule::gauss(int dim, double radius, int radial, int angular) {
    BallRule b;
    b.dim = dim;
    b.radius = radius;
    b.kind = "gauss";
    if (!(radius > 0.0)) {
        b.nodes = {Point(dim)};
        b.weights = {1.0};
        b.degree = 1000;
        return b;
    }
    const Rule1D rad = gauss_jacobi_unit(radial, dim - 1.0);
    std::vector<Point> dirs;
    std::vector<double> dw;
    sphere_rule(dim, angular, dirs, dw);
    for (int j = 0; j < radial; ++j)
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            b.nodes.push_back(radius * rad.nodes[j] * dirs[k]);
            b.weights.push_back(rad.weights[j] * dw[k]);
        }
    normalize(b.weights);
    const int m = static_cast<int>(dim == 3 ? std::sqrt(static_cast<double>(dirs.size()) * 2.0) : dirs.size());
    b.degree = dim == 1 ? 2 * radial - 1 : std::min(2 * radial - 1, m - 1);
    return b;
}

BallRule BallRule::lattice(const Point& spacing, double radius) {
    const int n = spacing.dim();
    if (radius < 2.0 * spacing[0] * (1.0 - 1e-12)) throw ConfigError("lattice ball rule needs radius >= 2h");
    BallRule b;
    b.dim = n;
    b.radius = radius;
    b.kind = "lattice";
    b.degree = 3;
    b.nodes = lattice_ball_points(spacing, radius);
    const std::size_t count = b.nodes.size();
    double mu = 0.0, rmax2 = 0.0;
    for (const Point& z : b.nodes) {
        mu += norm2(z);
        rmax2 = std::max(rmax2, norm2(z));
    }
    mu /= static_cast<double>(count);
    const double target = n * radius * radius / (n + 2.0);
    b.weights.assign(count, 1.0 / count);
    if (mu > target) {
        const double theta = 1.0 - target / mu;
        for (std::size_t i = 0; i < count; ++i) {
            b.weights[i] *= 1.0 - theta;
            if (norm2(b.nodes[i]) == 0.0) b.weights[i] += theta;
        }
    } else if (mu < target) {
        if (!(rmax2 > target)) throw ConfigError("lattice ball rule cannot match the second moment");
        const double theta = (target - mu) / (rmax2 - mu);
        std::size_t shell = 0;
        for (const Point& z : b.nodes)
            if (norm2(z) >= rmax2 * (1.0 - 1e-12)) ++shell;
        for (std::size_t i = 0; i < count; ++i) {
            b.weights[i] *= 1.0 - theta;
            if (norm2(b.nodes[i]) >= rmax2 * (1.0 - 1e-12)) b.weights[i] += theta / shell;
        }
    }
    normalize(b.weights);
    return b;
}

ExtremaSet ExtremaSet::dense(int dim, double radius, int ring, int radial, int angular) {
    ExtremaSet e;
    e.radius = radius;
    e.nodes.push_back(Point(dim));
    if (!(radius > 0.0)) return e;
    const BallRule b = BallRule::gauss(dim, radius, radial, angular);
    e.nodes.insert(e.nodes.end(), b.nodes.begin(), b.nodes.end());
    if (dim == 1) {
        e.nodes.push_back(Point{-radius});
        e.nodes.push_back(Point{radius});
    } else if (dim == 2) {
        for (int k = 0; k < ring; ++k) {
            const double a = 2.0 * kPi * k / ring;
            e.nodes.push_back(Point{radius * std::cos(a), radius * std::sin(a)});
        }
    } else {
        for (const Point& d : fibonacci_sphere(ring)) e.nodes.push_back(radius * d);
        for (int i = 0; i < 3; ++i) {
            e.nodes.push_back(radius * Point::unit(3, i));
            e.nodes.push_back(-radius * Point::unit(3, i));
        }
    }
    return e;
}

ExtremaSet ExtremaSet::lattice(const Point& spacing, double radius) {
    if (radius < 2.0 * spacing[0] * (1.0 - 1e-12)) throw ConfigError("lattice extrema set needs radius >= 2h");
    ExtremaSet e;
    e.radius = radius;
    e.nodes = lattice_ball_points(spacing, radius);
    return e;
}

double RadialDensity::radial(double r) const {
    const double v = std::pow(r, -1.0 - 2.0 * s);
    return lambda > 0.0 ? v * std::exp(-lambda * r) : v;
}

double RadialDensity::tail_upper(double R) const {
    const double v = std::pow(R, -2.0 * s) / (2.0 * s);
    return lambda > 0.0 ? v * std::exp(-lambda * R) : v;
}

double RadialDensity::mass_beyond(double eps) const {
    if (lambda == 0.0) return std::pow(eps, -2.0 * s) / (2.0 * s);
    PanelConfig cfg;
    cfg.tail_tol = 1e-14;
    cfg.points = 10;
    const RadialPanels p = radial_panels(*this, eps, cfg);
    return p.mass + tail_upper(p.R_tail);
}

PanelConfig PanelConfig::refined() const {
    PanelConfig c = *this;
    c.points = 2 * points;
    return c;
}

RadialPanels radial_panels(const RadialDensity& density, double eps, const PanelConfig& cfg) {
    if (!(eps > 0.0)) throw ConfigError("truncation radius must be positive");
    if (!(density.s > 0.0 && density.s < 1.0)) throw ConfigError("Levy order s must lie in (0,1)");
    if (!(cfg.ratio > 1.0 && cfg.far_ratio > 1.0 && cfg.points >= 1 && cfg.tail_tol > 0.0))
        throw ConfigError("invalid panel configuration");
    const Rule1D unit = gauss_legendre(cfg.points, 0.0, 1.0);
    RadialPanels out;
    out.eps = eps;
    double a = eps;
    for (;;) {
        const double b = a < cfg.cap ? std::min(a * cfg.ratio, a + cfg.max_width) : a * cfg.far_ratio;
        for (int i = 0; i < cfg.points; ++i) {
            const double r = a + (b - a) * unit.nodes[i];
            const double w = (b - a) * unit.weights[i] * density.radial(r);
            out.r.push_back(r);
            out.w.push_back(w);
            out.mass += w;
        }
        a = b;
        const double tail = density.tail_upper(a);
        if (tail <= cfg.tail_tol * std::min(1.0, out.mass)) {
            out.R_tail = a;
            out.tail_bound = tail / out.mass;
            break;
        }
        if (a > cfg.max_radius) throw ConfigError("Levy tail bound exceeds the requested tolerance");
    }
    return out;
}

AnnulusRule AnnulusRule::build(int dim, const RadialDensity& density, double eps, const PanelConfig& cfg,
                               int angular) {
    const RadialPanels p = radial_panels(density, eps, cfg);
    std::vector<Point> dirs;
    std::vector<double> dw;
    sphere_rule(dim, angular, dirs, dw);
    AnnulusRule a;
    a.dim = dim;
    a.eps = eps;
    a.R_tail = p.R_tail;
    a.tail_bound = p.tail_bound;
    a.mass = p.mass * special::sphere_area(dim);
    for (std::size_t i = 0; i < p.r.size(); ++i)
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            a.nodes.push_back(p.r[i] * dirs[k]);
            a.weights.push_back(p.w[i] * dw[k]);
        }
    normalize(a.weights);
    return a;
}

RayRule RayRule::build(double s, double eps, const PanelConfig& cfg) {
    if (!(s > 0.5 && s < 1.0)) throw ConfigError("ray averages need s in (1/2, 1)");
    const RadialPanels p = radial_panels(RadialDensity{s, 0.0}, eps, cfg);
    RayRule r;
    r.s = s;
    r.eps = eps;
    r.R_tail = p.R_tail;
    r.tail_bound = p.tail_bound;
    r.eta = p.r;
    r.weights = p.w;
    normalize(r.weights);
    return r;
}

DirectionSet DirectionSet::make(int dim, int count) {
    DirectionSet d;
    if (dim == 1) {
        d.dirs = {Point{-1.0}, Point{1.0}};
    } else if (dim == 2) {
        const int m = count > 0 ? count : 64;
        for (int k = 0; k < m; ++k) {
            const double a = 2.0 * kPi * k / m;
            d.dirs.push_back(Point{std::cos(a), std::sin(a)});
        }
    } else if (dim == 3) {
        d.dirs = fibonacci_sphere(count > 0 ? count : 256);
        for (Point& p : d.dirs) p *= 1.0 / norm(p);
    } else {
        throw ConfigError("direction sets support dimensions 1 to 3");
    }
    return d;
}

CylinderRule CylinderRule::gauss(int space_dim, double rho, int radial, int angular, int time_nodes) {
    CylinderRule c;
    c.space = BallRule::gauss(space_dim, std::sqrt(rho), radial, angular);
    c.window = rho / (space_dim + 2.0);
    const Rule1D t = gauss_legendre(time_nodes, -c.window, 0.0);
    c.dt = t.nodes;
    c.wt = t.weights;
    normalize(c.wt);
    return c;
}

CylinderRule CylinderRule::lattice(const Point& space_spacing, double ht, double rho) {
    CylinderRule c;
    const int n = space_spacing.dim();
    c.space = BallRule::lattice(space_spacing, std::sqrt(rho));
    c.window = rho / (n + 2.0);
    const double m = c.window / ht;
    const long mi = std::lround(m);
    if (mi < 1 || std::fabs(m - mi) > 1e-6) throw ConfigError("time window must be a positive multiple of the time step");
    for (long j = 0; j <= mi; ++j) {
        c.dt.push_back(-c.window + j * ht);
        c.wt.push_back(j == 0 || j == mi ? 0.5 : 1.0);
    }
    c.dt.back() = 0.0;
    normalize(c.wt);
    return c;
}

double ball_average(const BallRule& rule, const FieldEval& f, const Point& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(x + rule.nodes[i]);
    return s;
}

std::pair<double, double> ball_extrema(const ExtremaSet& set, const FieldEval& f, const Point& x) {
    double hi = -INFINITY, lo = INFINITY;
    for (const Point& z : set.nodes) {
        const double v = f(x + z);
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    return {hi, lo};
}

namespace {

// Neumaier summation; the nonlocal rules carry long tails of small weights.
struct CompensatedSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double t = s + v;
        c += std::fabs(s) >= std::fabs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

}  // namespace

double levy_annulus_average(const AnnulusRule& rule, const FieldEval& f, const Point& x) {
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s.add(rule.weights[i] * f(x + rule.nodes[i]));
    return s.value();
}

double ray_average(const RayRule& rule, const FieldEval& f, const Point& x, const Point& y) {
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.eta.size(); ++i) s.add(rule.weights[i] * f(x + rule.eta[i] * y));
    return s.value();
}

double cylinder_average(const CylinderRule& rule, const FieldEval& f, const Point& x, double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.dt.size(); ++j) {
        double inner = 0.0;
        for (std::size_t i = 0; i < rule.space.nodes.size(); ++i)
            inner += rule.space.weights[i] * f(append(x + rule.space.nodes[i], t + rule.dt[j]));
        s += rule.wt[j] * inner;
    }
    return s;
}

}  // namespace mvs
