#include <doctest.h>

#include <cmath>

#include "mvs/analysis.hpp"
#include "mvs/errors.hpp"
#include "mvs/special.hpp"

using namespace mvs;

namespace {

std::vector<std::pair<double, double>> power_law(double c, double q) {
    std::vector<std::pair<double, double>> v;
    for (double x : {0.1, 0.05, 0.025, 0.0125}) v.emplace_back(x, c * std::pow(x, q));
    return v;
}

OperatorSpec make_op(Family fam, int dim, double s = 0.75, double p = 4.0) {
    SchemeParams P;
    P.dim = dim;
    P.s = s;
    P.p = p;
    return OperatorSpec::make(fam, P);
}

}  // namespace

TEST_CASE("fit_rate") {
    const RateFit a = fit_rate(power_law(3.0, 2.0));
    CHECK(a.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(a.residual < 1e-12);
    CHECK(fit_rate(power_law(5.0, 0.5)).slope == doctest::Approx(0.5).epsilon(1e-12));
    auto z = power_law(1.0, 1.0);
    z[2].second = 0.0;
    const RateFit s = fit_rate(z);
    CHECK(s.sentinel);
    CHECK(std::isinf(s.slope));
    CHECK_FALSE(s.note.empty());
    CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.05, 0.5}}), ConfigError);
    CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.1, 0.5}, {0.05, 0.2}}), ConfigError);
    CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {-0.1, 0.5}, {0.05, 0.2}}), ConfigError);
}

TEST_CASE("consistency laplacian") {
    const OperatorSpec op = make_op(Family::laplacian, 2);
    const Domain disk = Domain::ball(Point{0.0, 0.0}, 1.0);
    const auto nodes = disk.sample(20);
    const TestFunction q = TestFunction::quadratic({1.0, 0.3, 0.3, -2.0}, Point{0.5, 1.0}, Point{0.1, 0.0});
    const auto rq = consistency_error(op, q, pde_operator(op, q), nodes, dyadic(1e-1, 4));
    for (const auto& r : rq.rows) CHECK(r.sup_lambda < 1e-10);

    const TestFunction s1 = TestFunction::trig(Point{1.0, 0.0});
    const auto rs = consistency_error(op, s1, pde_operator(op, s1), nodes, dyadic(1e-1, 6));
    CHECK(rs.fit.slope == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rs.scale_name == "rho");

    // slope stability
    const auto rs2 = consistency_error(op, s1, pde_operator(op, s1), nodes, dyadic(5e-2, 5));
    CHECK(std::fabs(rs2.fit.slope - rs.fit.slope) <= 0.1);

    // translation invariance
    const Point shift{0.37, -0.21};
    std::vector<Point> moved;
    for (const Point& x : nodes) moved.push_back(x + shift);
    const TestFunction s2 = TestFunction::trig(Point{1.0, 0.0}, -0.37);
    const auto rt = consistency_error(op, s2, pde_operator(op, s2), moved, dyadic(1e-1, 6));
    for (std::size_t i = 0; i < rs.rows.size(); ++i)
        CHECK(rt.rows[i].sup_lambda == doctest::Approx(rs.rows[i].sup_lambda).epsilon(1e-9));

    CHECK_THROWS_AS(consistency_error(op, s1, pde_operator(op, s1), nodes, {1e-2, 1e-1}), ConfigError);
}

TEST_CASE("consistency fractional in eps") {
    const OperatorSpec op = make_op(Family::fractional, 1, 0.75);
    const TestFunction g = TestFunction::gaussian(Point{0.5}, 1.0);
    const auto r = consistency_error(op, g, pde_operator(op, g), Domain::interval(0.0, 1.0).sample(15),
                                     dyadic(1e-1, 6));
    CHECK(r.scale_name == "eps");
    CHECK(r.rows.front().scale == doctest::Approx(std::pow(0.1, 1.0 / 1.5)));
    CHECK(r.fit.slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("restricted families need a nonvanishing gradient") {
    const OperatorSpec op = make_op(Family::normalized_p, 2);
    const TestFunction q = TestFunction::norm_squared(Point{0.0, 0.0});
    CHECK_THROWS_AS(consistency_error(op, q, pde_operator(op, q), {Point{0.0, 0.0}, Point{0.5, 0.0}}, dyadic(0.1, 3)),
                    ConfigError);
}

TEST_CASE("reference quadrature against closed forms") {
    const TestFunction g1 = TestFunction::gaussian(Point{0.5}, 1.0);
    const OperatorSpec f1 = make_op(Family::fractional, 1, 0.6);
    for (double x : {0.1, 0.45, 0.9})
        CHECK(reference_nonlocal(f1, g1, Point{x}) == doctest::Approx(g1.frac_laplacian(Point{x}, 0.6)).epsilon(1e-6));

    const TestFunction g2 = TestFunction::gaussian(Point{-1.5, 0.2}, 1.0);
    const OperatorSpec inf = make_op(Family::infinity_fractional, 2, 0.75);
    for (const Point& x : {Point{0.2, 0.1}, Point{-0.3, 0.5}}) {
        const Point gr = g2.gradient(x);
        const Point e = (1.0 / norm(gr)) * gr;
        CHECK(reference_nonlocal(inf, g2, x) == doctest::Approx(g2.line_frac_laplacian(x, e, 0.75)).epsilon(1e-6));
    }
    const OperatorSpec lv = make_op(Family::levy_generic, 2, 0.75);
    const Point x{0.2, 0.1};
    CHECK(reference_nonlocal(lv, g2, x) ==
          doctest::Approx(g2.frac_laplacian(x, 0.75) / special::frac_laplacian_constant(2, 0.75)).epsilon(1e-6));
    CHECK(pde_operator(lv, g2).reference == false);
    SchemeParams P;
    P.dim = 2;
    P.s = 0.75;
    P.lambda = 1.0;
    CHECK(pde_operator(OperatorSpec::make(Family::levy_generic, P), g2).reference);
    CHECK_THROWS_AS(reference_nonlocal(make_op(Family::laplacian, 1), g1, Point{0.1}), ConfigError);
}

TEST_CASE("convergence exact discrete fixed points") {
    SchemeParams P;
    const OperatorSpec lin = OperatorSpec::make(Family::laplacian, P);
    const Domain dom = Domain::interval(0.0, 1.0);
    const auto ra = convergence_study(lin, dom, TestFunction::affine(Point{1.0}, 0.0), {4e-2, 1e-2}, {1e-13, 1000000});
    for (const auto& r : ra.rows) {
        CHECK(r.converged);
        CHECK(r.sup_error <= 1e-9);
        CHECK(r.h == doctest::Approx(std::sqrt(r.rho) / 8.0));
    }
    P.f = [](const Point&) { return -2.0; };
    const OperatorSpec sq = OperatorSpec::make(Family::laplacian, P);
    const auto rq = convergence_study(sq, dom, TestFunction::norm_squared(Point{0.0}), {4e-2, 1e-2}, {1e-13, 1000000});
    for (const auto& r : rq.rows) CHECK(r.sup_error <= 1e-9);
    CHECK_THROWS_AS(convergence_study(lin, dom, TestFunction::norm_squared(Point{0.0}), {4e-2}), ConfigError);
}

TEST_CASE("convergence sine") {
    SchemeParams P;
    const double pi = special::kPi;
    P.f = [pi](const Point& x) { return pi * pi * std::sin(pi * x[0]); };
    const OperatorSpec op = OperatorSpec::make(Family::laplacian, P);
    const auto r = convergence_study(op, Domain::interval(0.0, 1.0), TestFunction::trig(Point{pi}), {4e-2, 1e-2},
                                     {1e-10, 1000000});
    CHECK(r.monotone_decrease);
    CHECK(r.exact_residual < 1e-8);
    // first-order consistency: error roughly quarters with rho
    CHECK(r.rows[1].sup_error < 0.35 * r.rows[0].sup_error);
}

TEST_CASE("mvp_check examples") {
    SchemeParams P;
    P.dim = 2;
    const OperatorSpec op = OperatorSpec::make(Family::laplacian, P);
    const TestFunction aff = TestFunction::affine(Point{1.0, -2.0}, 0.5);
    const FieldEval ua = [&](const Point& x) { return aff.value(x); };
    const Point x0{0.2, 0.3};
    const MVPReport a = mvp_check(op, ua, x0, aff, ContactSide::sub);
    CHECK(a.pass);
    CHECK(mvp_check(op, ua, x0, aff, ContactSide::super).pass);
    CHECK(a.rhos.size() == 8);
    CHECK(a.rhos.front() == 0.1);
    for (std::size_t k = 0; k < a.rhos.size(); ++k) {
        // K omega with K = 8 / rho
        CHECK(a.values_plus[k] == doctest::Approx(8.0 * a.rhos[k]).epsilon(1e-8));
        CHECK(a.values_minus[k] == doctest::Approx(-8.0 * a.rhos[k]).epsilon(1e-8));
    }

    const TestFunction sq = TestFunction::norm_squared(Point{0.0, 0.0});
    const FieldEval us = [&](const Point& x) { return sq.value(x); };
    const MVPReport b = mvp_check(op.with_source([](const Point&) { return -4.0; }, "-2N"), us, x0, sq,
                                  ContactSide::super);
    CHECK(b.pass);
    const MVPReport c = mvp_check(op, us, x0, sq, ContactSide::super);
    CHECK_FALSE(c.pass);
    CHECK(c.liminf == doctest::Approx(-4.0).epsilon(0.01));

    const TestFunction lower = sq.plus_constant(-0.1);
    CHECK_THROWS_AS(mvp_check(op, us, x0, lower, ContactSide::sub), ConfigError);
    const FieldEval bump = [&](const Point& x) { return sq.value(x) + 0.5 * norm2(x - x0); };
    CHECK_THROWS_AS(mvp_check(op, bump, x0, sq, ContactSide::sub), ConfigError);
    CHECK_NOTHROW(mvp_check(op, bump, x0, sq, ContactSide::super));
}

TEST_CASE("calibrate_C approaches the moment constant") {
    const OperatorSpec op = make_op(Family::implicit_p, 1, 0.5, 4.0);
    const TestFunction tf = TestFunction::trig(Point{1.0}, 0.4) + TestFunction::affine(Point{1.5}, 0.0);
    const auto rows = calibrate_C(op, tf, Domain::interval(0.0, 1.0).sample(9), dyadic(1e-2, 4));
    // uniform [-1,1]: E|z|^p = 1/(p+1), so C = 2 (p + 1)
    CHECK(rows.back().C_fit == doctest::Approx(10.0).epsilon(0.01));
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::fabs(rows[i].C_fit - 10.0) < std::fabs(rows[i - 1].C_fit - 10.0));
    CHECK_THROWS_AS(calibrate_C(make_op(Family::laplacian, 1), tf, {Point{0.5}}, {1e-2}), ConfigError);
}
