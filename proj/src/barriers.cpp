#include "mvs/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvs/errors.hpp"
#include "mvs/special.hpp"

namespace mvs {

BarrierSpec BarrierSpec::for_domain(const OperatorSpec& op, const Domain& domain, BarrierSign sign) {
    BarrierSpec b;
    b.family = op.family();
    b.dim = domain.dim();
    b.sign = sign;
    b.p = op.params().p;
    b.s = op.params().s;
    const double H = domain.halo();
    const Point c = domain.center();
    const double r = domain.max_distance_from(c);
    switch (op.family()) {
        case Family::normalized_p:
        case Family::implicit_p: {
            const double a = 2.0 * (r + H);
            b.x0 = c - a * Point::unit(b.dim, 0);
            b.R = domain.max_distance_from(b.x0) + H;
            b.center = c;
            break;
        }
        case Family::motivating: throw ConfigError("the motivating family has no strict barrier");
        default:
            b.center = c;
            b.R = 2.0 * (r + H);
            break;
    }
    return b;
}

Barrier build_barrier(const BarrierSpec& spec, const Domain& domain, double f_bound, double g_bound) {
    if (!std::isfinite(f_bound) || !std::isfinite(g_bound) || f_bound < 0.0 || g_bound < 0.0)
        throw ConfigError("barrier bounds must be finite and nonnegative");
    const int N = spec.dim;
    const double H = domain.halo();
    const double F = f_bound + 1.0;
    Barrier out;
    auto enclose = [&]() {
        if (domain.max_distance_from(spec.center) + H > 0.5 * spec.R * (1.0 + 1e-12))
            throw GeometryError("the halo domain must lie inside B_{R/2}");
    };
    switch (spec.family) {
        case Family::laplacian: {
            enclose();
            const double a = F / (2.0 * N);
            out.fn = TestFunction::radial_cap(spec.center, spec.R, 1.0, a).plus_constant(g_bound);
            out.constants = {{"R", spec.R, "geometry"}, {"amplitude", a, "(|f|+1)/(2N)"}};
            out.id = "quadratic cap";
            break;
        }
        case Family::heat: {
            enclose();
            const Point c = append(spec.center, 0.0);
            Point slope(N + 1);
            slope[N] = 0.5 * F;
            out.fn = TestFunction::radial_cap(c, spec.R, 1.0, F / (4.0 * N), N) +
                     TestFunction::affine(slope, 0.5 * F + g_bound);
            out.constants = {{"R", spec.R, "geometry"},
                             {"time_slope", 0.5 * F, "(|f|+1)/2"},
                             {"space_amplitude", F / (4.0 * N), "(|f|+1)/(4N)"}};
            out.id = "parabolic quadratic cap";
            break;
        }
        case Family::normalized_p:
        case Family::implicit_p: {
            const double p = spec.p;
            if (!(p >= 2.0)) throw ConfigError("p barriers require p >= 2");
            const double dmin = domain.min_distance_from(spec.x0) - H;
            const double dmax = domain.max_distance_from(spec.x0) + H;
            if (dmax > spec.R * (1.0 + 1e-12)) throw GeometryError("the halo domain must lie inside B_R(x0)");
            if (dmin < 0.25 * spec.R) throw GeometryError("the halo domain must avoid B_{R/4}(x0)");
            const double q = p / (p - 1.0);
            double C1;
            if (spec.family == Family::normalized_p) {
                C1 = F / (q * N * std::pow(spec.R, q - 2.0));
            } else {
                C1 = std::pow(F / N, 1.0 / (p - 1.0)) / q;
            }
            const double C2 = g_bound + C1 * std::pow(spec.R, q);
            out.fn = TestFunction::radial_power(spec.x0, q, -C1).plus_constant(C2);
            out.constants = {{"R", spec.R, "geometry"},
                             {"q", q, "p/(p-1)"},
                             {"C1", -C1, spec.family == Family::normalized_p ? "-(|f|+1)/(qN R^(q-2))"
                                                                             : "-((|f|+1)/N)^(1/(p-1))/q"},
                             {"C2", C2, "|g| + |C1| R^q"}};
            out.id = "radial power";
            break;
        }
        case Family::fractional:
        case Family::infinity_fractional:
        case Family::levy_generic: {
            enclose();
            const double s = spec.s;
            double amp;
            std::string name, src;
            if (spec.family == Family::fractional) {
                amp = special::frac_barrier_constant(N, s);
                name = "C_Ns";
                src = "2^(-2s) Gamma(N/2) / (Gamma((N+2s)/2) Gamma(1+s))";
            } else if (spec.family == Family::infinity_fractional) {
                if (!(s > 0.5)) throw ConfigError("infinity_fractional requires s > 1/2");
                amp = special::frac_barrier_constant(1, s);
                name = "k_s";
                src = "C_{1,s}";
            } else {
                amp = special::frac_barrier_constant(N, s) * special::frac_laplacian_constant(N, s);
                name = "c_Ns*C_Ns";
                src = "stable density without tempering";
            }
            out.fn = TestFunction::radial_cap(spec.center, spec.R, s, amp * F).plus_constant(g_bound);
            out.constants = {{"R", spec.R, "geometry"}, {name, amp, src}};
            out.id = "fractional cap";
            break;
        }
        case Family::motivating: throw ConfigError("the motivating family has no strict barrier");
    }
    if (spec.sign == BarrierSign::sub) {
        out.fn = -out.fn;
        out.id = "negated " + out.id;
    }
    return out;
}

BarrierCheck verify_strict_barrier(const OperatorSpec& op, const TestFunction& barrier, double delta,
                                   const std::vector<Point>& nodes, BarrierSign sign) {
    if (!(delta > 0.0)) throw ConfigError("barrier margin delta must be positive");
    if (op.family() == Family::levy_generic && op.params().lambda > 0.0)
        throw ConfigError("no closed-form barrier for tempered Levy densities");
    BarrierCheck c;
    c.rho = op.rho();
    c.nodes = nodes.size();
    const FieldEval fn = [&barrier](const Point& x) { return barrier.value(x); };
    double worst = std::numeric_limits<double>::infinity();
    for (const Point& x : nodes) {
        const double a = eval_scheme(op, x, fn, barrier.value(x));
        worst = std::min(worst, sign == BarrierSign::super ? a : -a);
    }
    c.min_margin = worst;
    c.holds = worst >= delta;
    return c;
}

Rho0Result find_rho0(const OperatorSpec& op, const TestFunction& barrier, double delta, const std::vector<Point>& nodes,
                     BarrierSign sign, double rho_max, double rho_min, int bisection_steps) {
    Rho0Result r;
    auto check = [&](double rho) {
        const BarrierCheck c = verify_strict_barrier(op.with_rho(rho), barrier, delta, nodes, sign);
        r.scan.emplace_back(rho, c.min_margin);
        return c;
    };
    double fail = -1.0;
    for (double rho = rho_max; rho >= rho_min * (1.0 - 1e-12); rho *= 0.5) {
        const BarrierCheck c = check(rho);
        if (c.holds) {
            r.found = true;
            r.rho0 = rho;
            r.at_rho0 = c;
            break;
        }
        fail = rho;
    }
    if (!r.found || fail < 0.0) return r;
    double lo = std::log(r.rho0), hi = std::log(fail);
    for (int i = 0; i < bisection_steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        const BarrierCheck c = check(std::exp(mid));
        if (c.holds) {
            lo = mid;
            r.rho0 = std::exp(mid);
            r.at_rho0 = c;
        } else {
            hi = mid;
        }
    }
    return r;
}

std::vector<Point> barrier_nodes(const OperatorSpec& op, const Domain& domain, int count, double T) {
    if (op.family() != Family::heat) return domain.sample(count);
    const int per = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(count)))));
    std::vector<Point> out;
    for (const Point& x : domain.sample(per))
        for (int j = 1; j <= per; ++j) out.push_back(append(x, T * j / per));
    return out;
}

}  // namespace mvs
