#include "mvs/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "mvs/analysis.hpp"
#include "mvs/barriers.hpp"
#include "mvs/errors.hpp"
#include "mvs/special.hpp"

namespace mvs {

using json = nlohmann::json;

namespace {

const std::set<std::string> kCommands = {"consistency", "solve", "converge", "barrier-check", "mvp-check",
                                         "calibrate-C"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
    return j.at(key).get<int>();
}

std::string str(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

Point point_of(const json& j, int dim, const std::string& what) {
    if (dim == 1 && j.is_number()) return Point{j.get<double>()};
    if (!j.is_array() || static_cast<int>(j.size()) != dim) throw ConfigError(what + " must have " + std::to_string(dim) + " coordinates");
    Point p(dim);
    for (int i = 0; i < dim; ++i) {
        if (!j[i].is_number()) throw ConfigError(what + " coordinates must be numbers");
        p[i] = j[i].get<double>();
    }
    return p;
}

int array_dim(const json& j) { return j.is_number() ? 1 : j.is_array() ? static_cast<int>(j.size()) : 0; }

Domain domain_of(const json& d) {
    const std::string kind = str(d, "kind", "");
    const double halo = num(d, "halo", 1.0);
    if (kind == "interval") {
        check_keys(d, {"kind", "lower", "upper", "halo"}, "domain");
        return Domain::interval(num(d, "lower", 0.0), num(d, "upper", 1.0), halo);
    }
    if (kind == "box") {
        check_keys(d, {"kind", "lower", "upper", "halo"}, "domain");
        if (!d.contains("lower") || !d.contains("upper")) throw ConfigError("box needs 'lower' and 'upper'");
        const int n = array_dim(d.at("lower"));
        return Domain::box(point_of(d.at("lower"), n, "lower"), point_of(d.at("upper"), n, "upper"), halo);
    }
    if (kind == "ball") {
        check_keys(d, {"kind", "center", "radius", "halo"}, "domain");
        if (!d.contains("center")) throw ConfigError("ball needs 'center'");
        const int n = array_dim(d.at("center"));
        return Domain::ball(point_of(d.at("center"), n, "center"), num(d, "radius", 1.0), halo);
    }
    if (kind == "annulus") {
        check_keys(d, {"kind", "center", "inner", "outer", "halo"}, "domain");
        if (!d.contains("center")) throw ConfigError("annulus needs 'center'");
        const int n = array_dim(d.at("center"));
        return Domain::annulus(point_of(d.at("center"), n, "center"), num(d, "inner", 0.5), num(d, "outer", 1.0), halo);
    }
    throw ConfigError("domain kind must be interval, box, ball or annulus");
}

std::vector<double> rho_list(const json& j) {
    std::vector<double> r;
    if (j.is_number()) {
        r.push_back(j.get<double>());
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError("rho entries must be numbers");
            r.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        check_keys(j, {"start", "count"}, "rho");
        const int count = integer(j, "count", 6);
        if (count < 1 || count > 60) throw ConfigError("rho count must lie in [1, 60]");
        r = dyadic(num(j, "start", 0.1), count);
    } else {
        throw ConfigError("rho must be a number, a list or {start, count}");
    }
    if (r.empty()) throw ConfigError("rho list is empty");
    for (double v : r)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("rho must be positive");
    return r;
}

struct Setup {
    json cfg;
    std::string command;
    Family family;
    Domain domain = Domain::interval(0.0, 1.0);
    int N = 1;
    int pdim = 1;
    SchemeParams params;
    QuadratureConfig quad;
    std::vector<double> rhos;
    std::optional<TestFunction> tf, exact;
    OperatorSpec op;
    std::shared_ptr<const ExteriorData> g;  // null: exact solution outside
};

FieldEval tf_eval(const TestFunction& t) {
    return [t](const Point& x) { return t.value(x); };
}

Setup build(const json& r) {
    Setup s;
    s.cfg = r;
    s.command = r.at("command");
    s.family = family_from_name(r.at("family"));
    s.domain = domain_of(r.at("domain"));
    s.N = s.domain.dim();
    s.pdim = s.family == Family::heat ? s.N + 1 : s.N;
    const json& p = r.at("params");
    s.params.dim = s.N;
    s.params.p = p.at("p");
    s.params.s = p.at("s");
    s.params.alpha = p.at("alpha");
    s.params.gamma = p.at("gamma");
    s.params.lambda = p.at("lambda");
    s.params.C = p.at("C");
    const json& q = r.at("quadrature");
    s.quad.ball_radial = q.at("ball_radial");
    s.quad.ball_angular = q.at("ball_angular");
    s.quad.ring = q.at("ring");
    s.quad.directions = q.at("directions");
    s.quad.annulus_angular = q.at("annulus_angular");
    s.quad.time_nodes = q.at("time_nodes");
    s.rhos = r.at("rho").get<std::vector<double>>();
    s.params.rho = s.rhos.front();
    if (r.contains("test_function")) s.tf = TestFunction::from_json(r.at("test_function"), s.pdim);
    if (r.contains("exact")) s.exact = TestFunction::from_json(r.at("exact"), s.pdim);
    const OperatorSpec bare = OperatorSpec::make(s.family, s.params, s.quad);

    const json& f = r.at("f");
    const double shift = r.at("f_shift");
    FieldEval fe;
    std::string fid;
    if (f.is_string() && f.get<std::string>() == "zero") {
        fid = "zero";
    } else if (f.is_string() && f.get<std::string>() == "from_solution") {
        const TestFunction& u = s.exact ? *s.exact : *s.tf;
        const PdeOperator F0 = pde_operator(bare, u);
        fe = [F0, u](const Point& x) { return F0.eval(u, x); };
        fid = "F(" + u.id() + ")";
    } else if (f.is_number()) {
        const double c = f.get<double>();
        fe = [c](const Point&) { return c; };
        fid = "constant";
    } else {
        const TestFunction ft = TestFunction::from_json(f, s.pdim);
        fe = tf_eval(ft);
        fid = ft.id();
    }
    if (shift != 0.0) {
        FieldEval base = fe;
        fe = [base, shift](const Point& x) { return (base ? base(x) : 0.0) + shift; };
        fid += "+shift";
    }
    s.params.f = fe;
    s.params.f_id = fid;
    s.op = OperatorSpec::make(s.family, s.params, s.quad);

    const json& g = r.at("g");
    if (g.is_number()) {
        s.g = std::make_shared<const ExteriorData>(ExteriorData::constant(g.get<double>()));
    } else if (g.is_object()) {
        const TestFunction gt = TestFunction::from_json(g, s.pdim);
        s.g = std::make_shared<const ExteriorData>(tf_eval(gt), 0.0, gt.id());
    }
    return s;
}

/// Points of the halo strip (outside the domain, inside the enlarged bounding box).
std::vector<Point> halo_points(const Domain& d, int count) {
    const double H = d.halo();
    Point lo = d.lower(), hi = d.upper();
    for (int i = 0; i < d.dim(); ++i) lo[i] -= H, hi[i] += H;
    std::vector<Point> out;
    for (const Point& x : Domain::box(lo, hi).sample(count))
        if (!d.contains(x) && d.min_distance_from(x) <= H) out.push_back(x);
    return out;
}

double sampled_sup(const FieldEval& f, const std::vector<Point>& pts) {
    double m = 0.0;
    if (!f) return 0.0;
    for (const Point& x : pts) m = std::max(m, std::fabs(f(x)));
    return m;
}

std::vector<Point> space_time(const std::vector<Point>& xs, bool heat, double t) {
    if (!heat) return xs;
    std::vector<Point> out;
    for (const Point& x : xs) out.push_back(append(x, t));
    return out;
}

bool has_barrier(const OperatorSpec& op) {
    return op.family() != Family::motivating && !(op.family() == Family::levy_generic && op.params().lambda > 0.0);
}

json provenance(const Setup& s) {
    json c;
    const double sv = s.params.s;
    if (sv > 0.0 && sv < 1.0) {
        c["c_Ns"] = special::frac_laplacian_constant(s.N, sv);
        c["C_s"] = special::frac_laplacian_constant(1, sv);
        c["C_Ns_barrier"] = special::frac_barrier_constant(s.N, sv);
    } else {
        c["c_Ns"] = nullptr;
        c["C_s"] = nullptr;
    }
    if (s.family == Family::implicit_p)
        c["C_implicit_p"] = {{"value", s.op.implicit_C()}, {"source", s.op.C_source()}};
    else
        c["C_implicit_p"] = {{"value", special::implicit_p_moment_constant(s.N, s.params.p)},
                             {"source", "moment formula (unused by this family)"}};
    return json{{"constants", c}};
}

std::string csv_header_rows(const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::string out = header + "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_number(r[i]);
        out += "\n";
    }
    return out;
}

json barrier_json(const Barrier& b) {
    json c = json::array();
    for (const auto& k : b.constants) c.push_back({{"name", k.name}, {"value", k.value}, {"source", k.source}});
    return json{{"id", b.id}, {"constants", c}, {"function", b.fn.to_json()}};
}

RunOutput run_consistency(const Setup& s) {
    if (!s.tf) throw ConfigError("consistency needs 'test_function'");
    const int n = s.cfg.at("nodes");
    const double T = s.cfg.at("T");
    const auto nodes = space_time(s.domain.sample(n), s.family == Family::heat, 0.5 * T);
    const PdeOperator F = pde_operator(s.op, *s.tf);
    const ConsistencyReport rep =
        consistency_error(s.op, *s.tf, F, nodes, s.rhos, std::to_string(n) + " low-discrepancy nodes of the domain");
    RunOutput out;
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({r.rho, r.sup_lambda});
        jr.push_back({{"rho", r.rho}, {"scale", r.scale}, {"sup_lambda", r.sup_lambda}, {"noise", r.noise},
                      {"flagged", r.flagged}});
    }
    out.csv = csv_header_rows("rho,sup_lambda", rows);
    out.report["results"] = {{"rows", jr},
                             {"scale", rep.scale_name},
                             {"slope", rep.fit.slope},
                             {"intercept", rep.fit.intercept},
                             {"fit_residual", rep.fit.residual},
                             {"F", rep.F_id},
                             {"F_reference_quadrature", rep.F_reference},
                             {"test_function", rep.tf_id},
                             {"nodes", rep.nodes},
                             {"notes", rep.notes}};
    bool finite = true;
    for (const auto& r : rep.rows) finite = finite && std::isfinite(r.sup_lambda);
    out.report["invariant_checks"] = {{"lambda_finite", finite}, {"rho_strictly_decreasing", true}};
    return out;
}

RunOutput run_solve(const Setup& s, bool strict) {
    const bool heat = s.family == Family::heat;
    const double T = s.cfg.at("T");
    OperatorSpec op = s.op;
    const double hcfg = s.cfg.at("h");
    const double h = hcfg > 0.0 ? hcfg : coupled_h(op);
    const double ht = heat ? coupled_ht(op) : 0.0;
    op = op.with_lattice(h, ht);
    const auto grid = make_grid(op, s.domain, h, heat ? T : 0.0, ht);
    const auto ext = exterior_samples(*grid, op.reach());
    std::shared_ptr<const ExteriorData> g = s.g;
    if (!g) {
        if (!s.exact) throw ConfigError("solve needs 'g' or 'exact'");
        g = std::make_shared<const ExteriorData>(ExteriorData::from(*s.exact, 0.0));
    }
    const double gb = sampled_sup(g->g, ext);
    g = std::make_shared<const ExteriorData>(g->g, gb, g->id);
    const LatticeField init = LatticeField::filled(grid, g, 0.0);
    SolveOptions o;
    o.tol = s.cfg.at("tol");
    o.max_iter = s.cfg.at("max_iter");
    auto [u, rep] = solve_dpp(op, init, o);

    RunOutput out;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.residual_history.size(); ++i)
        rows.push_back({static_cast<double>(i + 1), rep.residual_history[i]});
    out.csv = csv_header_rows("iter,residual", rows);
    json res = {{"converged", rep.converged},
                {"iterations", rep.iterations},
                {"final_residual", rep.final_residual},
                {"sup_norm", rep.sup_norm},
                {"h", h},
                {"ht", ht},
                {"nodes", u.size()},
                {"wall_time", rep.wall_time}};
    if (s.exact) {
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::fabs(u.values()[i] - s.exact->value(grid->node(i))));
        res["sup_error"] = err;
    }
    json checks = {{"converged", rep.converged}};
    if (has_barrier(op) && rep.converged) {
        const auto inner = space_time(s.domain.sample(64), heat, T);
        const double fb = sampled_sup(op.params().f, inner);
        json verdicts = json::array();
        bool all = true;
        for (BarrierSign sign : {BarrierSign::super, BarrierSign::sub}) {
            const Barrier b = build_barrier(BarrierSpec::for_domain(op, s.domain, sign), s.domain, fb, gb);
            const BarrierVerdict v = compare_with_barrier(u, tf_eval(b.fn), sign == BarrierSign::super ? Side::upper : Side::lower,
                                                          ext, sign == BarrierSign::super ? "super " + b.id : b.id);
            verdicts.push_back({{"id", v.id}, {"holds", v.holds}, {"max_violation", v.max_violation}});
            all = all && v.holds;
        }
        res["barriers"] = verdicts;
        checks["between_barriers"] = all;
    }
    out.report["results"] = res;
    out.report["invariant_checks"] = checks;
    if (strict && !rep.converged) out.status = kExitNoConvergence;
    return out;
}

RunOutput run_converge(const Setup& s, bool strict) {
    if (!s.exact) throw ConfigError("converge needs 'exact'");
    if (static_cast<double>(s.cfg.at("h")) != 0.0) throw ConfigError("converge always uses the coupled h; set h to 0");
    SolveOptions o;
    o.tol = s.cfg.at("tol");
    o.max_iter = s.cfg.at("max_iter");
    const bool heat = s.family == Family::heat;
    const ConvergenceReport rep =
        convergence_study(s.op, s.domain, *s.exact, s.rhos, o, s.g, heat ? static_cast<double>(s.cfg.at("T")) : 0.0);
    RunOutput out;
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    bool all = true;
    for (const auto& r : rep.rows) {
        rows.push_back({r.rho, r.h, r.sup_error, static_cast<double>(r.iters)});
        jr.push_back({{"rho", r.rho}, {"h", r.h}, {"sup_error", r.sup_error}, {"iters", r.iters},
                      {"converged", r.converged}, {"residual", r.residual}});
        all = all && r.converged;
    }
    out.csv = csv_header_rows("rho,h,sup_error,iters", rows);
    out.report["results"] = {{"rows", jr}, {"monotone_decrease", rep.monotone_decrease}, {"exact", rep.exact_id}};
    out.report["invariant_checks"] = {{"exact_residual", rep.exact_residual},
                                      {"exact_solves_pde", rep.exact_residual <= 1e-8},
                                      {"all_converged", all},
                                      {"h_coupling", "h = radius / 8"}};
    if (strict && !all) out.status = kExitNoConvergence;
    return out;
}

RunOutput run_barrier_check(const Setup& s) {
    const json& bc = s.cfg.at("barrier");
    const BarrierSign sign = bc.at("sign") == "sub" ? BarrierSign::sub : BarrierSign::super;
    const double delta = bc.at("delta");
    const double T = s.cfg.at("T");
    const bool heat = s.family == Family::heat;
    const auto nodes = barrier_nodes(s.op, s.domain, s.cfg.at("nodes"), T);
    const double fb = std::max(static_cast<double>(bc.at("f_bound")), sampled_sup(s.op.params().f, nodes));
    const auto halo = halo_points(s.domain, 400);
    double gb = bc.at("g_bound");
    if (s.g) gb = std::max(gb, sampled_sup(s.g->g, space_time(halo, heat, 0.0)));
    const Barrier b = build_barrier(BarrierSpec::for_domain(s.op, s.domain, sign), s.domain, fb, gb);

    RunOutput out;
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    for (double rho : s.rhos) {
        const BarrierCheck c = verify_strict_barrier(s.op.with_rho(rho), b.fn, delta, nodes, sign);
        rows.push_back({rho, c.min_margin});
        jr.push_back({{"rho", rho}, {"min_margin", c.min_margin}, {"holds", c.holds}});
    }
    out.csv = csv_header_rows("rho,min_margin", rows);
    json res = {{"rows", jr}, {"barrier", barrier_json(b)}, {"delta", delta}, {"f_bound", fb}, {"g_bound", gb},
                {"sign", sign == BarrierSign::super ? "super" : "sub"}};
    if (bc.at("find_rho0").get<bool>()) {
        const Rho0Result r0 = find_rho0(s.op, b.fn, delta, nodes, sign, s.rhos.front(), bc.at("rho_min"));
        res["rho0"] = r0.found ? json(r0.rho0) : json(nullptr);
        res["rho0_found"] = r0.found;
        res["rho0_min_margin"] = r0.at_rho0.min_margin;
    }
    double worst = INFINITY;
    for (const Point& x : space_time(halo, heat, 0.0)) {
        const double v = b.fn.value(x);
        worst = std::min(worst, sign == BarrierSign::super ? v - gb : -gb - v);
    }
    out.report["results"] = res;
    out.report["invariant_checks"] = {{"barrier_dominates_data", worst >= -1e-12}, {"dominance_margin", worst}};
    return out;
}

RunOutput run_mvp(const Setup& s) {
    if (!s.tf) throw ConfigError("mvp-check needs 'test_function'");
    const json& m = s.cfg.at("mvp");
    MVPConfig c;
    c.omega_power = m.at("omega_power");
    c.tau = m.at("tau");
    c.tail = m.at("tail");
    c.contact_radius = m.at("contact_radius");
    c.rhos = s.rhos;
    const Point x0 = point_of(m.at("x0"), s.pdim, "mvp x0");
    const ContactSide side = m.at("side") == "super" ? ContactSide::super : ContactSide::sub;
    const MVPReport r = mvp_check(s.op, tf_eval(*s.tf), x0, *s.tf, side, c);
    RunOutput out;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.rhos.size(); ++k) rows.push_back({r.rhos[k], r.values_plus[k], r.values_minus[k]});
    out.csv = csv_header_rows("rho,value_plus,value_minus", rows);
    out.report["results"] = {{"limsup", r.limsup}, {"liminf", r.liminf}, {"pass", r.pass},
                             {"side", side == ContactSide::sub ? "sub" : "super"}, {"tau", c.tau}};
    out.report["invariant_checks"] = {{"contact", true}, {"omega", "rho^" + csv_number(c.omega_power)}};
    return out;
}

RunOutput run_calibrate(const Setup& s) {
    if (!s.tf) throw ConfigError("calibrate-C needs 'test_function'");
    const auto rows_c = calibrate_C(s.op, *s.tf, s.domain.sample(s.cfg.at("nodes")), s.rhos);
    RunOutput out;
    std::vector<std::vector<double>> rows;
    for (const auto& r : rows_c) rows.push_back({r.rho, r.C_fit});
    out.csv = csv_header_rows("rho,C_fit", rows);
    out.report["results"] = {{"C_used", s.op.implicit_C()}, {"C_source", s.op.C_source()},
                             {"C_fit_smallest_rho", rows_c.back().C_fit}};
    out.report["invariant_checks"] = json::object();
    return out;
}

}  // namespace

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json error_record(int status, const std::string& kind, const std::string& message) {
    return json{{"status", status}, {"error", kind}, {"message", message}};
}

json resolve_config(const json& raw) {
    check_keys(raw, {"command", "family", "domain", "dim", "params", "rho", "test_function", "exact", "f", "f_shift",
                     "g", "nodes", "tol", "max_iter", "h", "T", "barrier", "mvp", "quadrature"},
               "config");
    json r;
    const std::string cmd = str(raw, "command", "");
    if (!kCommands.count(cmd)) throw ConfigError("command must be one of consistency, solve, converge, barrier-check, mvp-check, calibrate-C");
    r["command"] = cmd;
    if (!raw.contains("family")) throw ConfigError("config needs 'family'");
    const Family fam = family_from_name(str(raw, "family", ""));
    r["family"] = family_name(fam);
    if (!raw.contains("domain")) throw ConfigError("config needs 'domain'");
    const Domain dom = domain_of(raw.at("domain"));
    json d = raw.at("domain");
    d["halo"] = dom.halo();
    r["domain"] = d;
    if (raw.contains("dim") && integer(raw, "dim", 0) != dom.dim()) throw ConfigError("'dim' disagrees with the domain");
    r["dim"] = dom.dim();
    const int pdim = fam == Family::heat ? dom.dim() + 1 : dom.dim();

    json p = raw.value("params", json::object());
    check_keys(p, {"p", "s", "alpha", "gamma", "lambda", "C"}, "params");
    r["params"] = {{"p", num(p, "p", 2.0)},         {"s", num(p, "s", 0.5)},
                   {"alpha", num(p, "alpha", 0.5)}, {"gamma", num(p, "gamma", 1.0)},
                   {"lambda", num(p, "lambda", 0.0)}, {"C", num(p, "C", 0.0)}};

    json q = raw.value("quadrature", json::object());
    check_keys(q, {"ball_radial", "ball_angular", "ring", "directions", "annulus_angular", "time_nodes"}, "quadrature");
    const QuadratureConfig qd;
    r["quadrature"] = {{"ball_radial", integer(q, "ball_radial", qd.ball_radial)},
                       {"ball_angular", integer(q, "ball_angular", qd.ball_angular)},
                       {"ring", integer(q, "ring", qd.ring)},
                       {"directions", integer(q, "directions", qd.directions)},
                       {"annulus_angular", integer(q, "annulus_angular", qd.annulus_angular)},
                       {"time_nodes", integer(q, "time_nodes", qd.time_nodes)}};

    if (raw.contains("rho")) {
        r["rho"] = rho_list(raw.at("rho"));
    } else if (cmd == "mvp-check") {
        r["rho"] = dyadic(1e-1, 8);
    } else if (cmd == "barrier-check") {
        r["rho"] = dyadic(0.5, 12);
    } else {
        throw ConfigError("config needs 'rho'");
    }
    const auto rhos = r["rho"].get<std::vector<double>>();
    if (cmd != "solve")
        for (std::size_t i = 1; i < rhos.size(); ++i)
            if (!(rhos[i] < rhos[i - 1])) throw ConfigError("rho values must be strictly decreasing");

    for (const char* key : {"test_function", "exact"})
        if (raw.contains(key)) {
            TestFunction::from_json(raw.at(key), pdim);
            r[key] = raw.at(key);
        }
    const bool needs_tf = cmd == "consistency" || cmd == "mvp-check" || cmd == "calibrate-C";
    if (needs_tf && !r.contains("test_function")) throw ConfigError(cmd + " needs 'test_function'");
    if (cmd == "converge" && !r.contains("exact")) throw ConfigError("converge needs 'exact'");

    json f = raw.value("f", json("zero"));
    if (f.is_string()) {
        const std::string fs = f.get<std::string>();
        if (fs != "zero" && fs != "from_solution") throw ConfigError("f must be \"zero\", \"from_solution\", a number or a test function");
        if (fs == "from_solution" && !r.contains("exact") && !r.contains("test_function"))
            throw ConfigError("f = from_solution needs 'exact' or 'test_function'");
    } else if (f.is_object()) {
        TestFunction::from_json(f, pdim);
    } else if (!f.is_number()) {
        throw ConfigError("f must be \"zero\", \"from_solution\", a number or a test function");
    }
    r["f"] = f;
    r["f_shift"] = num(raw, "f_shift", 0.0);

    json g = raw.value("g", r.contains("exact") ? json("exact") : json(0.0));
    if (g.is_string()) {
        if (g.get<std::string>() != "exact" || !r.contains("exact")) throw ConfigError("g = \"exact\" needs 'exact'");
    } else if (g.is_object()) {
        TestFunction::from_json(g, pdim);
    } else if (!g.is_number()) {
        throw ConfigError("g must be \"exact\", a number or a test function");
    }
    r["g"] = g;

    r["nodes"] = integer(raw, "nodes", 20);
    if (r["nodes"].get<int>() < 1) throw ConfigError("nodes must be positive");
    r["tol"] = num(raw, "tol", 1e-9);
    if (!(r["tol"].get<double>() > 0.0)) throw ConfigError("tol must be positive");
    r["max_iter"] = integer(raw, "max_iter", 100000);
    if (r["max_iter"].get<int>() < 0) throw ConfigError("max_iter must be nonnegative");
    r["h"] = num(raw, "h", 0.0);
    if (r["h"].get<double>() < 0.0) throw ConfigError("h must be nonnegative (0 selects the coupling rule)");
    r["T"] = num(raw, "T", 1.0);
    if (!(r["T"].get<double>() > 0.0)) throw ConfigError("T must be positive");

    json b = raw.value("barrier", json::object());
    check_keys(b, {"sign", "delta", "f_bound", "g_bound", "find_rho0", "rho_min"}, "barrier");
    const std::string sign = str(b, "sign", "super");
    if (sign != "super" && sign != "sub") throw ConfigError("barrier sign must be super or sub");
    if (b.contains("find_rho0") && !b.at("find_rho0").is_boolean()) throw ConfigError("find_rho0 must be a boolean");
    r["barrier"] = {{"sign", sign},
                    {"delta", num(b, "delta", 0.5)},
                    {"f_bound", num(b, "f_bound", 0.0)},
                    {"g_bound", num(b, "g_bound", 0.0)},
                    {"find_rho0", b.value("find_rho0", true)},
                    {"rho_min", num(b, "rho_min", 1e-6)}};

    json m = raw.value("mvp", json::object());
    check_keys(m, {"x0", "side", "omega_power", "tau", "tail", "contact_radius"}, "mvp");
    const std::string side = str(m, "side", "sub");
    if (side != "sub" && side != "super") throw ConfigError("mvp side must be sub or super");
    json x0 = m.contains("x0") ? m.at("x0") : json(dom.center().to_vector());
    if (fam == Family::heat && !m.contains("x0")) x0.push_back(0.5 * r["T"].get<double>());
    point_of(x0, pdim, "mvp x0");
    r["mvp"] = {{"x0", x0},
                {"side", side},
                {"omega_power", num(m, "omega_power", 2.0)},
                {"tau", num(m, "tau", 0.1)},
                {"tail", integer(m, "tail", 3)},
                {"contact_radius", num(m, "contact_radius", 0.25)}};

    build(r);  // parameter validation
    return r;
}

RunOutput run_experiment(const json& resolved, bool strict) {
    const Setup s = build(resolved);
    RunOutput out;
    if (s.command == "consistency") out = run_consistency(s);
    else if (s.command == "solve") out = run_solve(s, strict);
    else if (s.command == "converge") out = run_converge(s, strict);
    else if (s.command == "barrier-check") out = run_barrier_check(s);
    else if (s.command == "mvp-check") out = run_mvp(s);
    else out = run_calibrate(s);
    out.csv_name = s.command + ".csv";
    out.report["command"] = s.command;
    out.report["config"] = resolved;
    out.report["provenance"] = provenance(s);
    out.report["status"] = out.status;
    return out;
}

}  // namespace mvs
