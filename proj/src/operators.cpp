#include "mvs/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvs/errors.hpp"
#include "mvs/special.hpp"

namespace mvs {

namespace {

int default_directions(int dim) { return dim == 2 ? 64 : dim == 3 ? 256 : 2; }

long double jp(long double t, double p) {
    if (p == 2.0) return t;
    const long double a = std::fabs(t);
    if (a == 0.0L) return 0.0L;
    return std::pow(a, static_cast<long double>(p) - 2.0L) * t;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::laplacian: return "laplacian";
        case Family::heat: return "heat";
        case Family::motivating: return "motivating";
        case Family::normalized_p: return "normalized_p";
        case Family::implicit_p: return "implicit_p";
        case Family::fractional: return "fractional";
        case Family::infinity_fractional: return "infinity_fractional";
        case Family::levy_generic: return "levy_generic";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    for (Family f : {Family::laplacian, Family::heat, Family::motivating, Family::normalized_p, Family::implicit_p,
                     Family::fractional, Family::infinity_fractional, Family::levy_generic})
        if (family_name(f) == name) return f;
    if (name == "p_laplacian") return Family::normalized_p;
    throw ConfigError("unknown operator family '" + name + "'");
}

bool is_nonlocal(Family f) {
    return f == Family::fractional || f == Family::infinity_fractional || f == Family::levy_generic;
}

QuadratureConfig QuadratureConfig::refined() const {
    QuadratureConfig q = *this;
    q.ball_radial *= 2;
    q.ball_angular *= 2;
    q.ring *= 2;
    q.annulus_angular *= 2;
    q.time_nodes *= 2;
    q.panels = panels.refined();
    return q;
}

OperatorSpec OperatorSpec::make(Family family, SchemeParams params, QuadratureConfig quad) {
    OperatorSpec op;
    op.family_ = family;
    op.params_ = std::move(params);
    op.quad_ = quad;
    op.build();
    return op;
}

OperatorSpec OperatorSpec::with_rho(double rho) const {
    SchemeParams p = params_;
    p.rho = rho;
    return make(family_, p, quad_);
}

OperatorSpec OperatorSpec::with_source(FieldEval f, std::string id) const {
    OperatorSpec op = *this;
    op.params_.f = std::move(f);
    op.params_.f_id = std::move(id);
    return op;
}

OperatorSpec OperatorSpec::with_lattice(double h, double ht) const {
    QuadratureConfig q = quad_;
    q.lattice_h = h;
    q.lattice_ht = ht;
    return make(family_, params_, q);
}

OperatorSpec OperatorSpec::with_C(double C, std::string source) const {
    SchemeParams p = params_;
    p.C = C;
    OperatorSpec op = make(family_, p, quad_);
    op.C_source_ = std::move(source);
    return op;
}

OperatorSpec OperatorSpec::refined() const {
    QuadratureConfig q = quad_.refined();
    q.directions = 2 * (quad_.directions > 0 ? quad_.directions : default_directions(params_.dim));
    if (params_.dim == 1) q.directions = 0;
    OperatorSpec op = make(family_, params_, q);
    op.C_source_ = C_source_;
    return op;
}

void OperatorSpec::build() {
    const SchemeParams& P = params_;
    const int N = P.dim;
    if (!(P.rho > 0.0)) throw ConfigError("rho must be positive");
    if (N < 1 || N > 3) throw ConfigError("space dimension must be 1, 2 or 3");
    if (!(P.root_tol > 0.0) || P.max_root_steps < 1) throw ConfigError("root tolerance and step limit must be positive");

    const double h = quad_.lattice_h;
    auto make_ball = [&](double r) -> std::shared_ptr<const BallRule> {
        if (h > 0.0 && r >= 2.0 * h * (1.0 - 1e-9)) {
            Point sp(N);
            for (int i = 0; i < N; ++i) sp[i] = h;
            lattice_aligned_ = true;
            return std::make_shared<const BallRule>(BallRule::lattice(sp, r));
        }
        return std::make_shared<const BallRule>(BallRule::gauss(N, r, quad_.ball_radial, quad_.ball_angular));
    };
    auto make_extrema = [&](double r) -> std::shared_ptr<const ExtremaSet> {
        if (h > 0.0 && r >= 2.0 * h * (1.0 - 1e-9)) {
            Point sp(N);
            for (int i = 0; i < N; ++i) sp[i] = h;
            return std::make_shared<const ExtremaSet>(ExtremaSet::lattice(sp, r));
        }
        return std::make_shared<const ExtremaSet>(
            ExtremaSet::dense(N, r, quad_.ring, quad_.ball_radial, quad_.ball_angular));
    };
    auto check_s = [&](double lo) {
        if (!(P.s > lo && P.s < 1.0)) {
            if (lo == 0.5) throw ConfigError("infinity_fractional requires s in (1/2, 1)");
            throw ConfigError("fractional order s must lie in (0, 1)");
        }
    };

    lattice_aligned_ = false;
    switch (family_) {
        case Family::laplacian:
            radius_ = std::sqrt(P.rho);
            K_ = 2.0 * (N + 2.0) / P.rho;
            ball_ = make_ball(radius_);
            break;
        case Family::heat: {
            radius_ = std::sqrt(P.rho);
            K_ = 2.0 * (N + 2.0) / P.rho;
            if (h > 0.0 && quad_.lattice_ht > 0.0 && radius_ >= 2.0 * h * (1.0 - 1e-9)) {
                Point sp(N);
                for (int i = 0; i < N; ++i) sp[i] = h;
                cyl_ = std::make_shared<const CylinderRule>(CylinderRule::lattice(sp, quad_.lattice_ht, P.rho));
                lattice_aligned_ = true;
            } else {
                cyl_ = std::make_shared<const CylinderRule>(
                    CylinderRule::gauss(N, P.rho, quad_.ball_radial, quad_.ball_angular, quad_.time_nodes));
            }
            break;
        }
        case Family::motivating:
            if (!(P.alpha > 0.0 && P.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
            radius_ = std::sqrt(P.rho);
            K_ = 1.0;
            ball_ = make_ball(radius_);
            extrema_ = make_extrema(P.rho);
            break;
        case Family::normalized_p:
            if (!(P.p >= 2.0)) throw ConfigError("normalized_p requires p >= 2 (monotonicity fails for p < 2)");
            if (!(P.gamma > 0.0)) throw ConfigError("gamma must be positive");
            radius_ = P.gamma * std::sqrt(P.rho);
            K_ = 2.0 * (N + P.p) / (radius_ * radius_);
            ball_ = make_ball(radius_);
            extrema_ = make_extrema(radius_);
            break;
        case Family::implicit_p:
            if (!(P.p >= 2.0)) throw ConfigError("implicit_p requires p >= 2 (p in (1,2) is not supported)");
            if (P.C < 0.0) throw ConfigError("implicit_p constant C must be positive");
            radius_ = std::pow(P.rho, 1.0 / P.p);
            if (P.C > 0.0) {
                C_ = P.C;
                if (C_source_.empty()) C_source_ = "config";
            } else {
                C_ = special::implicit_p_moment_constant(N, P.p);
                C_source_ = "moment formula";
            }
            K_ = C_ / P.rho;
            ball_ = make_ball(radius_);
            break;
        case Family::fractional:
            check_s(0.0);
            radius_ = std::pow(P.rho, 0.5 / P.s);
            K_ = special::sphere_area(N) * special::frac_laplacian_constant(N, P.s) / (2.0 * P.s * P.rho);
            annulus_ = std::make_shared<const AnnulusRule>(
                AnnulusRule::build(N, RadialDensity{P.s, 0.0}, radius_, quad_.panels, quad_.annulus_angular));
            break;
        case Family::infinity_fractional:
            check_s(0.5);
            radius_ = std::pow(P.rho, 0.5 / P.s);
            K_ = special::frac_laplacian_constant(1, P.s) / (P.s * P.rho);
            ray_ = std::make_shared<const RayRule>(RayRule::build(P.s, radius_, quad_.panels));
            dirs_ = std::make_shared<const DirectionSet>(DirectionSet::make(N, quad_.directions));
            break;
        case Family::levy_generic: {
            check_s(0.0);
            if (P.lambda < 0.0) throw ConfigError("tempering lambda must be nonnegative");
            const RadialDensity mu{P.s, P.lambda};
            radius_ = levy_truncation(N, mu, P.rho);
            K_ = 1.0 / P.rho;
            annulus_ = std::make_shared<const AnnulusRule>(
                AnnulusRule::build(N, mu, radius_, quad_.panels, quad_.annulus_angular));
            break;
        }
    }
}

double OperatorSpec::tail_bound() const {
    if (annulus_) return annulus_->tail_bound;
    if (ray_) return ray_->tail_bound;
    return 0.0;
}

double OperatorSpec::reach() const {
    if (annulus_) return annulus_->R_tail;
    if (ray_) return ray_->R_tail;
    return radius_;
}

double eval_average(const OperatorSpec& spec, const Point& x, const FieldEval& phi) {
    const SchemeParams& P = spec.params();
    const int N = P.dim;
    switch (spec.family()) {
        case Family::laplacian: return ball_average(*spec.ball(), phi, x);
        case Family::heat: return cylinder_average(*spec.cylinder(), phi, head(x, N), x[N]);
        case Family::motivating:
            return P.alpha * ball_average(*spec.ball(), phi, x) +
                   (1.0 - P.alpha) * ball_extrema(*spec.extrema(), phi, x).first;
        case Family::normalized_p: {
            const auto [hi, lo] = ball_extrema(*spec.extrema(), phi, x);
            return (P.p - 2.0) / (P.p + N) * 0.5 * (hi + lo) + (N + 2.0) / (N + P.p) * ball_average(*spec.ball(), phi, x);
        }
        case Family::fractional:
        case Family::levy_generic: return levy_annulus_average(*spec.annulus(), phi, x);
        case Family::infinity_fractional: {
            double hi = -INFINITY, lo = INFINITY;
            for (const Point& y : spec.directions()->dirs) {
                const double m = ray_average(*spec.ray(), phi, x, y);
                hi = std::max(hi, m);
                lo = std::min(lo, m);
            }
            return 0.5 * hi + 0.5 * lo;
        }
        case Family::implicit_p: throw ConfigError("implicit_p has no explicit average; use eval_mean");
    }
    return 0.0;
}

std::pair<Point, Point> ray_extremal_directions(const OperatorSpec& spec, const Point& x, const FieldEval& phi) {
    if (spec.family() != Family::infinity_fractional) throw ConfigError("ray directions exist only for infinity_fractional");
    double hi = -INFINITY, lo = INFINITY;
    Point ahi, alo;
    for (const Point& y : spec.directions()->dirs) {
        const double m = ray_average(*spec.ray(), phi, x, y);
        if (m > hi) hi = m, ahi = y;
        if (m < lo) lo = m, alo = y;
    }
    return {ahi, alo};
}

double eval_scheme(const OperatorSpec& spec, const Point& x, const FieldEval& phi, double s) {
    if (spec.family() == Family::implicit_p) {
        const BallRule& b = *spec.ball();
        long double acc = 0.0L;
        for (std::size_t i = 0; i < b.nodes.size(); ++i)
            acc += static_cast<long double>(b.weights[i]) * jp(static_cast<long double>(s) - phi(x + b.nodes[i]), spec.params().p);
        return static_cast<double>(static_cast<long double>(spec.coefficient()) * acc - spec.source(x));
    }
    const double a0 = eval_average(spec, x, phi);
    if (spec.family() == Family::motivating) return s - a0;
    return spec.coefficient() * (s - a0) - spec.source(x);
}

double eval_mean(const OperatorSpec& spec, const Point& x, const FieldEval& phi, RootStats* stats) {
    if (spec.family() == Family::implicit_p) return solve_pointwise(spec, x, phi, std::nullopt, stats);
    const double a0 = eval_average(spec, x, phi);
    if (spec.family() == Family::motivating) return a0;
    return a0 + spec.source(x) / spec.coefficient();
}

double solve_implicit_root(const std::vector<double>& values, const std::vector<double>& weights, double p,
                           double C_over_rho, double f, double root_tol, int max_steps,
                           std::optional<std::pair<double, double>> bracket_hint, RootStats* stats) {
    if (!(p >= 2.0)) throw ConfigError("implicit root requires p >= 2");
    const long double K = C_over_rho;
    auto G = [&](long double s) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < values.size(); ++i) acc += static_cast<long double>(weights[i]) * jp(s - values[i], p);
        return K * acc - static_cast<long double>(f);
    };
    const double target = root_tol * (1.0 + std::fabs(f));
    RootStats local;

    long double a, b, ga, gb;
    bool bracketed = false;
    if (bracket_hint) {
        a = bracket_hint->first;
        b = bracket_hint->second;
        ga = G(a);
        gb = G(b);
        bracketed = a < b && ga <= 0.0L && gb >= 0.0L;
    }
    if (!bracketed) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        const double osc = *mx - *mn;
        double delta = osc + std::pow(std::fabs(f) / C_over_rho, 1.0 / (p - 1.0)) +
                       1e-12 * (1.0 + std::fabs(*mx) + std::fabs(*mn));
        for (;;) {
            a = *mn - delta;
            b = *mx + delta;
            ga = G(a);
            gb = G(b);
            if (ga <= 0.0L && gb >= 0.0L) break;
            if (++local.widenings > 60) throw InvariantError("implicit root: no sign change after bracket widening");
            delta *= 2.0;
        }
    }

    long double s = a, gs = ga;
    if (std::fabs(ga) > std::fabs(gb)) {
        s = b;
        gs = gb;
    }
    int side = 0;
    while (local.steps < max_steps && std::fabs(static_cast<double>(gs)) > 0.25 * target) {
        ++local.steps;
        long double c = b - gb * (b - a) / (gb - ga);
        if (!(c > a && c < b) || local.steps % 4 == 0) c = 0.5L * (a + b);
        const long double gc = G(c);
        if (gc == 0.0L) {
            s = c;
            gs = gc;
            break;
        }
        if (gc < 0.0L) {
            a = c;
            ga = gc;
            if (side == -1) gb *= 0.5L;
            side = -1;
        } else {
            b = c;
            gb = gc;
            if (side == 1) ga *= 0.5L;
            side = 1;
        }
        s = c;
        gs = gc;
        if (b - a <= 4.0L * std::numeric_limits<long double>::epsilon() * (1.0L + std::fabs(s))) break;
    }
    // best double near the long double root
    double best = static_cast<double>(s);
    double gbest = std::fabs(static_cast<double>(G(best)));
    for (double cand : {std::nextafter(best, -INFINITY), std::nextafter(best, INFINITY)}) {
        const double gc = std::fabs(static_cast<double>(G(cand)));
        if (gc < gbest) {
            best = cand;
            gbest = gc;
        }
    }
    local.residual = gbest;
    if (stats) *stats = local;
    return best;
}

double solve_pointwise(const OperatorSpec& spec, const Point& x, const FieldEval& phi,
                       std::optional<std::pair<double, double>> bracket_hint, RootStats* stats) {
    if (spec.family() != Family::implicit_p) {
        if (stats) *stats = RootStats{};
        return eval_mean(spec, x, phi);
    }
    const BallRule& b = *spec.ball();
    std::vector<double> vals(b.nodes.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = phi(x + b.nodes[i]);
    const SchemeParams& P = spec.params();
    return solve_implicit_root(vals, b.weights, P.p, spec.coefficient(), spec.source(x), P.root_tol, P.max_root_steps,
                               bracket_hint, stats);
}

double eval_boundary_scheme(const OperatorSpec& spec, const ExteriorData& g, const LatticeGrid::Predicate& inside,
                            const Point& x, const FieldEval& phi, double s) {
    if (inside(x)) return eval_scheme(spec, x, phi, s);
    return s - g(x);
}

double levy_truncation(int dim, const RadialDensity& density, double rho) {
    const double area = special::sphere_area(dim);
    const double eps0 = std::pow(area * rho / (2.0 * density.s), 0.5 / density.s);
    if (density.lambda == 0.0) return eps0;
    // tempering lowers the mass, so the root lies below the stable value
    double lo = std::log(eps0) - 40.0, hi = std::log(eps0);
    const double target = 1.0 / rho;
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (area * density.mass_beyond(std::exp(mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace mvs
