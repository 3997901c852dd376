#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvs/field.hpp"
#include "mvs/point.hpp"

namespace mvs {

/// Center-relative nodes in the closed ball B_r(0), nonnegative weights summing to 1.
struct BallRule {
    int dim = 1;
    double radius = 0.0;
    int degree = 0;
    std::string kind;
    std::vector<Point> nodes;
    std::vector<double> weights;

    /// Radial Gauss-Jacobi (weight t^{N-1}) times an angular rule.
    static BallRule gauss(int dim, double radius, int radial = 8, int angular = 16);
    /// Lattice offsets m*h with |m*h| <= r; uniform weights blended with the center or the
    /// outermost shell so the second moment is exact. Needs r >= 2h.
    static BallRule lattice(const Point& spacing, double radius);
};

/// Fixed node set inside the closed ball used for sup/inf estimates.
struct ExtremaSet {
    double radius = 0.0;
    std::vector<Point> nodes;

    /// Gauss ball nodes, the center and a dense boundary set of `ring` points.
    static ExtremaSet dense(int dim, double radius, int ring = 4096, int radial = 8, int angular = 16);
    static ExtremaSet lattice(const Point& spacing, double radius);
};

/// Radial Levy density k(r) = r^{-N-2s} e^{-lambda r}; `radial` includes the r^{N-1} Jacobian.
struct RadialDensity {
    double s = 0.5;
    double lambda = 0.0;

    double radial(double r) const;
    /// Upper bound for the radial mass beyond R.
    double tail_upper(double R) const;
    /// Radial mass beyond eps (closed form for lambda = 0, panel quadrature otherwise).
    double mass_beyond(double eps) const;
};

struct PanelConfig {
    double ratio = 1.1;
    int points = 6;
    double max_width = 0.25;
    double cap = 4.0;
    double far_ratio = 1.25;
    double tail_tol = 1e-8;  // radial mass left beyond R_tail
    double max_radius = 1e300;

    PanelConfig refined() const;
};

/// Graded radial rule on (eps, R_tail) with weights carrying the density.
struct RadialPanels {
    double eps = 0.0;
    double R_tail = 0.0;
    double tail_bound = 0.0;
    double mass = 0.0;  // sum of weights before normalization
    std::vector<double> r;
    std::vector<double> w;
};

RadialPanels radial_panels(const RadialDensity& density, double eps, const PanelConfig& cfg);

/// Nodes with |z| > eps for the measure k(|z|) dz, normalized to sum 1.
struct AnnulusRule {
    int dim = 1;
    double eps = 0.0;
    double R_tail = 0.0;
    double tail_bound = 0.0;
    double mass = 0.0;  // truncated mu(|z| > eps)
    std::vector<Point> nodes;
    std::vector<double> weights;

    static AnnulusRule build(int dim, const RadialDensity& density, double eps, const PanelConfig& cfg,
                             int angular = 32);
};

/// One-dimensional rule on (eps, R_tail) for eta^{-1-2s} d eta, normalized to sum 1.
struct RayRule {
    double s = 0.75;
    double eps = 0.0;
    double R_tail = 0.0;
    double tail_bound = 0.0;
    std::vector<double> eta;
    std::vector<double> weights;

    static RayRule build(double s, double eps, const PanelConfig& cfg);
};

struct DirectionSet {
    std::vector<Point> dirs;

    /// 1D: {-1,+1}. 2D: `count` equiangular. 3D: `count` Fibonacci points.
    static DirectionSet make(int dim, int count = 0);
};

/// Space ball of radius sqrt(rho) times the backward time window [t - rho/(N+2), t].
struct CylinderRule {
    BallRule space;
    double window = 0.0;
    std::vector<double> dt;  // offsets in [-window, 0]
    std::vector<double> wt;

    static CylinderRule gauss(int space_dim, double rho, int radial = 8, int angular = 16, int time_nodes = 4);
    /// Lattice ball in space and trapezoid in time; window must be a multiple of ht.
    static CylinderRule lattice(const Point& space_spacing, double ht, double rho);
};

double ball_average(const BallRule& rule, const FieldEval& f, const Point& x);
std::pair<double, double> ball_extrema(const ExtremaSet& set, const FieldEval& f, const Point& x);
double levy_annulus_average(const AnnulusRule& rule, const FieldEval& f, const Point& x);
double ray_average(const RayRule& rule, const FieldEval& f, const Point& x, const Point& y);
/// `f` takes space-time points (time last).
double cylinder_average(const CylinderRule& rule, const FieldEval& f, const Point& x, double t);

}  // namespace mvs
