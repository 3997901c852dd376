#include <doctest.h>

#include <cmath>

#include "mvs/barriers.hpp"
#include "mvs/errors.hpp"
#include "mvs/special.hpp"

using namespace mvs;

namespace {

OperatorSpec make_op(Family fam, int dim, double rho, double s = 0.75, double p = 4.0) {
    SchemeParams P;
    P.rho = rho;
    P.dim = dim;
    P.s = s;
    P.p = p;
    return OperatorSpec::make(fam, P);
}

}  // namespace

TEST_CASE("laplacian barrier example") {
    const Domain dom = Domain::interval(-0.5, 0.5, 0.5);
    const OperatorSpec op = make_op(Family::laplacian, 1, 1e-3);
    BarrierSpec bs = BarrierSpec::for_domain(op, dom);
    CHECK(bs.R == doctest::Approx(2.0));
    const Barrier b = build_barrier(bs, dom, 0.0, 0.0);
    for (double x : {-1.5, -0.3, 0.0, 0.7, 1.9, 2.5}) {
        const double want = 0.5 * std::max(0.0, 4.0 - x * x);
        CHECK(b.fn.value(Point{x}) == doctest::Approx(want).epsilon(1e-14));
    }
    CHECK(-b.fn.laplacian(Point{0.2}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fractional barrier example") {
    const Domain dom = Domain::interval(-0.5, 0.5, 0.5);
    const OperatorSpec op = make_op(Family::fractional, 1, 1e-3);
    const Barrier b = build_barrier(BarrierSpec::for_domain(op, dom), dom, 0.0, 0.0);
    const double C = special::frac_barrier_constant(1, 0.75);
    CHECK(C == doctest::Approx(std::pow(2.0, -1.5) * std::tgamma(0.5) / (std::tgamma(1.25) * std::tgamma(1.75))));
    for (double x : {-0.4, 0.0, 0.3}) {
        CHECK(b.fn.value(Point{x}) == doctest::Approx(C * std::pow(4.0 - x * x, 0.75)));
        CHECK(b.fn.frac_laplacian(Point{x}, 0.75) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("sub barrier is the negation") {
    const Domain dom = Domain::ball(Point{0.0, 0.0}, 1.0);
    for (Family fam : {Family::laplacian, Family::fractional, Family::normalized_p, Family::implicit_p,
                       Family::infinity_fractional}) {
        const OperatorSpec op = make_op(fam, 2, 1e-2);
        const Barrier up = build_barrier(BarrierSpec::for_domain(op, dom), dom, 1.5, 0.5);
        const Barrier dn = build_barrier(BarrierSpec::for_domain(op, dom, BarrierSign::sub), dom, 1.5, 0.5);
        for (const Point& x : dom.sample(25, 0.8)) CHECK(dn.fn.value(x) == -up.fn.value(x));
    }
}

TEST_CASE("barrier geometry") {
    const Domain dom = Domain::box(Point{0.0, 0.0}, Point{1.0, 2.0});
    const OperatorSpec op = make_op(Family::normalized_p, 2, 1e-2);
    const BarrierSpec bs = BarrierSpec::for_domain(op, dom);
    CHECK(dom.min_distance_from(bs.x0) - dom.halo() >= 0.25 * bs.R);
    CHECK(dom.max_distance_from(bs.x0) + dom.halo() <= bs.R);
    BarrierSpec bad = bs;
    bad.x0 = dom.center();
    CHECK_THROWS_AS(build_barrier(bad, dom, 0.0, 0.0), GeometryError);
    BarrierSpec small = BarrierSpec::for_domain(make_op(Family::laplacian, 2, 1e-2), dom);
    small.R = 1.0;
    CHECK_THROWS_AS(build_barrier(small, dom, 0.0, 0.0), GeometryError);
    CHECK_THROWS_AS(BarrierSpec::for_domain(make_op(Family::motivating, 2, 1e-2), dom), ConfigError);
    CHECK_THROWS_AS(build_barrier(BarrierSpec::for_domain(op, dom), dom, INFINITY, 0.0), ConfigError);
}

TEST_CASE("verify_strict_barrier examples") {
    const Domain dom = Domain::interval(-0.5, 0.5, 0.5);
    const OperatorSpec op = make_op(Family::laplacian, 1, 1e-3);
    const Barrier b = build_barrier(BarrierSpec::for_domain(op, dom), dom, 0.0, 0.0);
    const auto nodes = barrier_nodes(op, dom, 40);
    const BarrierCheck c = verify_strict_barrier(op, b.fn, 0.5, nodes);
    CHECK(c.holds);
    CHECK(c.min_margin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(verify_strict_barrier(op, b.fn, 2.0, nodes).holds);
    CHECK_THROWS_AS(verify_strict_barrier(op, b.fn, 0.0, nodes), ConfigError);

    const Domain disk = Domain::ball(Point{0.0, 0.0}, 1.0, 0.25);
    const OperatorSpec inf = make_op(Family::infinity_fractional, 2, 1e-3);
    const Barrier bi = build_barrier(BarrierSpec::for_domain(inf, disk), disk, 0.0, 0.0);
    CHECK(verify_strict_barrier(inf, bi.fn, 0.5, barrier_nodes(inf, disk, 20)).holds);
    const Barrier si = build_barrier(BarrierSpec::for_domain(inf, disk, BarrierSign::sub), disk, 0.0, 0.0);
    CHECK(verify_strict_barrier(inf, si.fn, 0.5, barrier_nodes(inf, disk, 20), BarrierSign::sub).holds);
}

TEST_CASE("radial reduction of extremal rays") {
    const Domain disk = Domain::ball(Point{0.0, 0.0}, 1.0, 0.25);
    const OperatorSpec op = make_op(Family::infinity_fractional, 2, 1e-3);
    const Barrier b = build_barrier(BarrierSpec::for_domain(op, disk), disk, 0.0, 0.0);
    const FieldEval fn = [&](const Point& x) { return b.fn.value(x); };
    const double spacing = 2.0 * special::kPi / op.directions()->dirs.size();
    for (const Point& x : disk.sample(12, 0.9)) {
        if (norm(x) < 0.05) continue;
        const auto [hi, lo] = ray_extremal_directions(op, x, fn);
        const Point e = (1.0 / norm(x)) * x;
        CHECK(std::acos(std::min(1.0, -dot(hi, e))) <= spacing);
        CHECK(std::acos(std::min(1.0, dot(lo, e))) <= spacing);
    }
}

TEST_CASE("barrier dominates data") {
    const Domain dom = Domain::ball(Point{0.0, 0.0}, 1.0);
    for (Family fam : {Family::laplacian, Family::fractional, Family::normalized_p, Family::infinity_fractional}) {
        const OperatorSpec op = make_op(fam, 2, 1e-2);
        const Barrier up = build_barrier(BarrierSpec::for_domain(op, dom), dom, 2.0, 0.7);
        for (const Point& x : dom.with_halo(1.0).sample(200))
            if (!dom.contains(x)) CHECK(up.fn.value(x) >= 0.7 - 1e-14);
    }
}

TEST_CASE("margin approaches the continuum value") {
    const Domain dom = Domain::interval(0.0, 1.0, 0.5);
    for (Family fam : {Family::laplacian, Family::fractional}) {
        const OperatorSpec op = make_op(fam, 1, 1e-1);
        const Barrier b = build_barrier(BarrierSpec::for_domain(op, dom), dom, 0.0, 0.0);
        const auto nodes = barrier_nodes(op, dom, 15);
        double prev = INFINITY;
        for (double rho = 1e-1; rho >= 1e-4; rho *= 0.25) {
            const double err = std::fabs(verify_strict_barrier(op.with_rho(rho), b.fn, 0.5, nodes).min_margin - 1.0);
            CHECK(err <= 1.1 * prev + 1e-9);
            prev = err;
        }
        CHECK(prev < (fam == Family::laplacian ? 1e-6 : 0.05));
    }
}

TEST_CASE("find_rho0") {
    const Domain dom = Domain::interval(0.0, 1.0, 0.5);
    const OperatorSpec op = make_op(Family::fractional, 1, 1e-2, 0.6);
    const Barrier b = build_barrier(BarrierSpec::for_domain(op, dom), dom, 0.0, 0.0);
    const auto nodes = barrier_nodes(op, dom, 10);
    const Rho0Result r = find_rho0(op, b.fn, 0.5, nodes, BarrierSign::super);
    REQUIRE(r.found);
    CHECK(r.at_rho0.holds);
    CHECK(verify_strict_barrier(op.with_rho(r.rho0), b.fn, 0.5, nodes).holds);
    CHECK_FALSE(find_rho0(op, b.fn, 5.0, nodes, BarrierSign::super, 0.5, 1e-3).found);
}
