#include "mvs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvs/errors.hpp"
#include "mvs/special.hpp"

namespace mvs {

namespace {

constexpr double kRefEps = 1e-4;

double hess_quad(const std::vector<double>& H, int D, const Point& v, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += H[i * D + j] * v[i] * v[j];
    return acc;
}

double space_laplacian(const std::vector<double>& H, int D, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += H[i * D + i];
    return acc;
}

/// Delta phi + (p - 2) <D^2 phi nu, nu> and |grad phi|.
std::pair<double, double> p_parts(const TestFunction& tf, const Point& x, int N, double p) {
    const Point g = head(tf.gradient(x), N);
    const std::vector<double> H = tf.hessian(x);
    const int D = x.dim();
    const double gn = norm(g);
    double v = space_laplacian(H, D, N);
    if (gn > 0.0) v += (p - 2.0) * hess_quad(H, D, (1.0 / gn) * g, N);
    return {v, gn};
}

Point unit_gradient(const TestFunction& tf, const Point& x, int N) {
    const Point g = head(tf.gradient(x), N);
    const double gn = norm(g);
    if (!(gn > 0.0)) throw ConfigError("test function gradient vanishes at a node");
    return (1.0 / gn) * g;
}

long double jp(long double t, double p) { return std::pow(std::fabs(t), static_cast<long double>(p) - 2.0L) * t; }

bool needs_gradient(Family f) { return f == Family::normalized_p || f == Family::infinity_fractional; }

}  // namespace

double reference_nonlocal(const OperatorSpec& op, const TestFunction& tf, const Point& x) {
    const SchemeParams& P = op.params();
    const int N = P.dim;
    PanelConfig cfg = op.quad().panels.refined().refined();
    cfg.tail_tol = 1e-15;
    cfg.max_radius = 1e300;
    const FieldEval fn = [&tf](const Point& y) { return tf.value(y); };
    const double phi = tf.value(x);
    const double near = std::pow(kRefEps, 2.0 - 2.0 * P.s) / (2.0 - 2.0 * P.s);
    switch (op.family()) {
        case Family::fractional:
        case Family::levy_generic: {
            const AnnulusRule rule =
                AnnulusRule::build(N, RadialDensity{P.s, op.family() == Family::fractional ? 0.0 : P.lambda}, kRefEps,
                                   cfg, 2 * op.quad().annulus_angular);
            const double far = rule.mass * (phi - levy_annulus_average(rule, fn, x));
            const double v = far - special::sphere_area(N) * tf.laplacian(x) / (2.0 * N) * near;
            return op.family() == Family::fractional ? special::frac_laplacian_constant(N, P.s) * v : v;
        }
        case Family::infinity_fractional: {
            const Point e = unit_gradient(tf, x, N);
            const RayRule rule = RayRule::build(P.s, kRefEps, cfg);
            const double m = std::pow(kRefEps, -2.0 * P.s) / (2.0 * P.s);
            const double far = m * (2.0 * phi - ray_average(rule, fn, x, e) - ray_average(rule, fn, x, -e));
            const double pvv = hess_quad(tf.hessian(x), x.dim(), e, N);
            return special::frac_laplacian_constant(1, P.s) * (far - pvv * near);
        }
        default: throw ConfigError("reference quadrature applies to nonlocal families only");
    }
}

PdeOperator pde_operator(const OperatorSpec& op, const TestFunction& tf) {
    const SchemeParams P = op.params();
    const int N = P.dim;
    const OperatorSpec spec = op;
    auto src = [spec](const Point& x) { return spec.source(x); };
    PdeOperator F;
    switch (op.family()) {
        case Family::laplacian:
            F.id = "-lap u - f";
            F.eval = [src](const TestFunction& t, const Point& x) { return -t.laplacian(x) - src(x); };
            break;
        case Family::heat:
            F.id = "u_t - lap u - f";
            F.eval = [src, N](const TestFunction& t, const Point& x) {
                const std::vector<double> H = t.hessian(x);
                return t.gradient(x)[N] - space_laplacian(H, N + 1, N) - src(x);
            };
            break;
        case Family::motivating:
            F.id = "0";
            F.eval = [](const TestFunction&, const Point&) { return 0.0; };
            break;
        case Family::normalized_p:
            F.id = "-normalized p-laplacian u - f";
            F.eval = [src, N, p = P.p](const TestFunction& t, const Point& x) {
                unit_gradient(t, x, N);
                return -p_parts(t, x, N, p).first - src(x);
            };
            break;
        case Family::implicit_p:
            F.id = "-p-laplacian u - f";
            F.eval = [src, N, p = P.p](const TestFunction& t, const Point& x) {
                const auto [v, gn] = p_parts(t, x, N, p);
                return -std::pow(gn, p - 2.0) * v - src(x);
            };
            break;
        case Family::fractional:
            if (tf.has_frac_laplacian()) {
                F.id = "(-lap)^s u - f";
                F.eval = [src, s = P.s](const TestFunction& t, const Point& x) { return t.frac_laplacian(x, s) - src(x); };
            } else {
                F.id = "(-lap)^s u - f [reference quadrature]";
                F.reference = true;
                F.eval = [src, spec](const TestFunction& t, const Point& x) { return reference_nonlocal(spec, t, x) - src(x); };
            }
            break;
        case Family::infinity_fractional:
            if (tf.has_frac_laplacian()) {
                F.id = "(-d_vv)^s u - f";
                F.eval = [src, N, s = P.s](const TestFunction& t, const Point& x) {
                    return t.line_frac_laplacian(x, unit_gradient(t, x, N), s) - src(x);
                };
            } else {
                F.id = "(-d_vv)^s u - f [reference quadrature]";
                F.reference = true;
                F.eval = [src, spec](const TestFunction& t, const Point& x) { return reference_nonlocal(spec, t, x) - src(x); };
            }
            break;
        case Family::levy_generic:
            if (P.lambda == 0.0 && tf.has_frac_laplacian()) {
                F.id = "L_mu u - f";
                F.eval = [src, N, s = P.s](const TestFunction& t, const Point& x) {
                    return t.frac_laplacian(x, s) / special::frac_laplacian_constant(N, s) - src(x);
                };
            } else {
                F.id = "L_mu u - f [reference quadrature]";
                F.reference = true;
                F.eval = [src, spec](const TestFunction& t, const Point& x) { return reference_nonlocal(spec, t, x) - src(x); };
            }
            break;
    }
    return F;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw ConfigError("rate fit needs at least 3 pairs");
    for (const auto& [h, e] : pairs) {
        if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("rate fit scales must be positive and finite");
        if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("rate fit errors must be nonnegative and finite");
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j)
            if (pairs[i].first == pairs[j].first) throw ConfigError("rate fit scales must be distinct");
    RateFit r;
    for (const auto& [h, e] : pairs)
        if (e == 0.0) {
            r.slope = std::numeric_limits<double>::infinity();
            r.intercept = -std::numeric_limits<double>::infinity();
            r.sentinel = true;
            r.note = "zero error present; slope reported as +inf";
            return r;
        }
    const double n = static_cast<double>(pairs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, e] : pairs) {
        const double lx = std::log(h), ly = std::log(e);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    r.slope = (n * sxy - sx * sy) / den;
    r.intercept = (sy - r.slope * sx) / n;
    double ss = 0.0;
    for (const auto& [h, e] : pairs) {
        const double d = std::log(e) - (r.intercept + r.slope * std::log(h));
        ss += d * d;
    }
    r.residual = std::sqrt(ss / n);
    return r;
}

ConsistencyReport consistency_error(const OperatorSpec& op, const TestFunction& tf, const PdeOperator& F,
                                    const std::vector<Point>& nodes, const std::vector<double>& rhos,
                                    std::string nodes_desc) {
    if (nodes.empty()) throw ConfigError("consistency needs sample nodes");
    for (std::size_t i = 1; i < rhos.size(); ++i)
        if (!(rhos[i] < rhos[i - 1])) throw ConfigError("rho values must be strictly decreasing");
    if (needs_gradient(op.family()))
        for (const Point& x : nodes)
            if (!(norm(head(tf.gradient(x), op.dim())) > 1e-8))
                throw ConfigError("test function gradient vanishes at a node (restricted family)");

    ConsistencyReport rep;
    rep.family = family_name(op.family());
    rep.tf_id = tf.id();
    rep.F_id = F.id;
    rep.F_reference = F.reference;
    rep.scale_name = is_nonlocal(op.family()) ? "eps" : "rho";
    rep.nodes = nodes_desc.empty() ? std::to_string(nodes.size()) + " nodes" : std::move(nodes_desc);

    const int n = static_cast<int>(nodes.size());
    std::vector<double> Fx(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) Fx[i] = F.eval(tf, nodes[i]);

    const FieldEval fn = [&tf](const Point& y) { return tf.value(y); };
    for (double rho : rhos) {
        const OperatorSpec a = op.with_rho(rho);
        const OperatorSpec b = a.refined();
        std::vector<double> lam(n), noise(n);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            const Point& x = nodes[i];
            const double v = tf.value(x);
            const double l1 = eval_scheme(a, x, fn, v) - Fx[i];
            const double l2 = eval_scheme(b, x, fn, v) - Fx[i];
            lam[i] = std::fabs(l1);
            noise[i] = std::fabs(l1 - l2);
        }
        ConsistencyRow row;
        row.rho = rho;
        row.scale = is_nonlocal(op.family()) ? a.radius() : rho;
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(lam[i])) throw InvariantError("non-finite consistency error");
            row.sup_lambda = std::max(row.sup_lambda, lam[i]);
            row.noise = std::max(row.noise, noise[i]);
        }
        row.flagged = row.noise > 0.1 * row.sup_lambda;
        rep.rows.push_back(row);
    }

    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : rep.rows)
        if (!r.flagged) pairs.emplace_back(r.scale, r.sup_lambda);
    if (pairs.size() < rep.rows.size())
        rep.notes.push_back(std::to_string(rep.rows.size() - pairs.size()) + " rho values flagged by quadrature noise");
    if (pairs.size() >= 3) {
        rep.fit = fit_rate(pairs);
        if (rep.fit.sentinel) rep.notes.push_back(rep.fit.note);
    } else {
        rep.fit.slope = std::numeric_limits<double>::quiet_NaN();
        rep.fit.intercept = std::numeric_limits<double>::quiet_NaN();
        rep.fit.note = "fewer than 3 unflagged rho values";
        rep.notes.push_back(rep.fit.note);
    }
    return rep;
}

ConvergenceReport convergence_study(const OperatorSpec& op, const Domain& domain, const TestFunction& exact,
                                    const std::vector<double>& rhos, const SolveOptions& opts,
                                    std::shared_ptr<const ExteriorData> g, double T) {
    const bool heat = op.family() == Family::heat;
    if (heat && !(T > 0.0)) throw ConfigError("heat convergence needs a final time T > 0");
    ConvergenceReport rep;
    rep.family = family_name(op.family());
    rep.exact_id = exact.id();

    std::vector<Point> check;
    for (const Point& x : domain.sample(32)) {
        if (heat)
            for (int j = 1; j <= 4; ++j) check.push_back(append(x, T * j / 4.0));
        else
            check.push_back(x);
    }
    const PdeOperator F = pde_operator(op, exact);
    for (const Point& x : check) rep.exact_residual = std::max(rep.exact_residual, std::fabs(F.eval(exact, x)));
    if (rep.exact_residual > 1e-8) throw ConfigError("exact solution does not solve the PDE at the sample nodes");

    if (!g) {
        const Domain wide = domain.with_halo(domain.halo());
        std::vector<Point> pts;
        for (const Point& x : wide.sample(512)) {
            if (heat)
                for (double t : {-1.0, 0.0, T}) pts.push_back(append(x, t));
            else
                pts.push_back(x);
        }
        const double bound = exact.derivative_bounds(pts)[0];
        g = std::make_shared<const ExteriorData>(ExteriorData::from(exact, bound));
    }

    for (double rho : rhos) {
        OperatorSpec a = op.with_rho(rho);
        const double h = coupled_h(a);
        const double ht = heat ? coupled_ht(a) : 0.0;
        a = a.with_lattice(h, ht);
        const auto grid = make_grid(a, domain, h, T, ht);
        const LatticeField init = LatticeField::filled(grid, g, 0.0);
        const auto [u, sr] = solve_dpp(a, init, opts);
        ConvergenceRow row;
        row.rho = rho;
        row.h = h;
        row.iters = sr.iterations;
        row.converged = sr.converged;
        row.residual = sr.final_residual;
        for (std::size_t i = 0; i < u.size(); ++i)
            row.sup_error = std::max(row.sup_error, std::fabs(u.values()[i] - exact.value(grid->node(i))));
        rep.rows.push_back(row);
    }
    rep.monotone_decrease = rep.rows.size() >= 2;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].sup_error < rep.rows[i - 1].sup_error)) rep.monotone_decrease = false;
    return rep;
}

MVPReport mvp_check(const OperatorSpec& op, const FieldEval& u, const Point& x0, const TestFunction& phi,
                    ContactSide side, const MVPConfig& cfg) {
    if (!(cfg.omega_power > 1.0)) throw ConfigError("omega must be rho^q with q > 1");
    if (cfg.tail < 1) throw ConfigError("mvp tail must be positive");
    const double tol = 1e-12;
    auto check_contact = [&](const Point& y) {
        const double d = phi.value(y) - u(y);
        const double sc = tol * (1.0 + std::fabs(u(y)));
        if (side == ContactSide::sub ? d < -sc : d > sc)
            throw ConfigError("test function does not touch the candidate from the declared side");
    };
    if (std::fabs(phi.value(x0) - u(x0)) > tol * (1.0 + std::fabs(u(x0))))
        throw ConfigError("test function does not touch the candidate at x0");
    static const double primes[] = {2.0, 3.0, 5.0, 7.0};
    for (int k = 1; k <= cfg.contact_samples; ++k) {
        Point y = x0;
        for (int i = 0; i < x0.dim(); ++i) {
            const double a = std::fmod(k * std::sqrt(primes[i]), 1.0);
            y[i] += cfg.contact_radius * (2.0 * a - 1.0);
        }
        check_contact(y);
    }

    MVPReport rep;
    rep.x0 = x0;
    rep.side = side;
    rep.rhos = cfg.rhos.empty() ? dyadic(1e-1, 8) : cfg.rhos;
    const FieldEval fn = [&phi](const Point& y) { return phi.value(y); };
    const double v0 = phi.value(x0);
    for (double rho : rep.rhos) {
        const OperatorSpec a = op.with_rho(rho);
        const double w = std::pow(rho, cfg.omega_power);
        rep.values_plus.push_back(eval_scheme(a, x0, fn, v0 + w));
        rep.values_minus.push_back(eval_scheme(a, x0, fn, v0 - w));
    }
    const std::size_t n = rep.rhos.size();
    const std::size_t from = n > static_cast<std::size_t>(cfg.tail) ? n - cfg.tail : 0;
    rep.limsup = -std::numeric_limits<double>::infinity();
    rep.liminf = std::numeric_limits<double>::infinity();
    for (std::size_t k = from; k < n; ++k) {
        rep.limsup = std::max({rep.limsup, rep.values_plus[k], rep.values_minus[k]});
        rep.liminf = std::min({rep.liminf, rep.values_plus[k], rep.values_minus[k]});
    }
    rep.pass = side == ContactSide::sub ? rep.limsup <= cfg.tau : rep.liminf >= -cfg.tau;
    return rep;
}

std::vector<CalibrationRow> calibrate_C(const OperatorSpec& op, const TestFunction& tf,
                                        const std::vector<Point>& nodes, const std::vector<double>& rhos) {
    if (op.family() != Family::implicit_p) throw ConfigError("calibrate-C applies to implicit_p only");
    const int N = op.dim();
    const double p = op.params().p;
    std::vector<CalibrationRow> out;
    for (double rho : rhos) {
        const OperatorSpec a = op.with_rho(rho);
        const BallRule& b = *a.ball();
        std::vector<double> fits;
        for (const Point& x : nodes) {
            const auto [v, gn] = p_parts(tf, x, N, p);
            const double target = -std::pow(gn, p - 2.0) * v;
            const double phi = tf.value(x);
            long double S = 0.0L;
            for (std::size_t i = 0; i < b.nodes.size(); ++i)
                S += static_cast<long double>(b.weights[i]) * jp(phi - tf.value(x + b.nodes[i]), p);
            if (std::fabs(target) < 1e-8 || S == 0.0L) continue;
            fits.push_back(rho * target / static_cast<double>(S));
        }
        if (fits.empty()) throw ConfigError("calibration test function has vanishing p-laplacian at every node");
        std::sort(fits.begin(), fits.end());
        const std::size_t m = fits.size();
        out.push_back({rho, m % 2 ? fits[m / 2] : 0.5 * (fits[m / 2 - 1] + fits[m / 2])});
    }
    return out;
}

std::vector<double> dyadic(double rho0, int count) {
    std::vector<double> r;
    for (int k = 0; k < count; ++k) r.push_back(std::ldexp(rho0, -k));
    return r;
}

}  // namespace mvs
