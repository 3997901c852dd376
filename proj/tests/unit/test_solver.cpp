#include <doctest.h>

#include <cmath>
#include <random>

#include "mvs/errors.hpp"
#include "mvs/solver.hpp"

using namespace mvs;

namespace {

struct Setup1D {
    OperatorSpec op;
    std::shared_ptr<const LatticeGrid> grid;
};

Setup1D laplace_1d(double rho, FieldEval f = nullptr) {
    SchemeParams P;
    P.rho = rho;
    P.f = std::move(f);
    OperatorSpec op = OperatorSpec::make(Family::laplacian, P);
    const double h = coupled_h(op);
    op = op.with_lattice(h);
    return {op, make_grid(op, Domain::interval(0.0, 1.0), h)};
}

}  // namespace

TEST_CASE("sweep examples") {
    auto [op, grid] = laplace_1d(0.01);
    CHECK(op.lattice_aligned());
    auto gx = std::make_shared<const ExteriorData>([](const Point& x) { return 2.0 * x[0] - 0.5; }, 2.0);
    const LatticeField u = LatticeField::sampled(grid, gx, gx->g);
    const LatticeField v = sweep(op, u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::fabs(v.values()[i] - u.values()[i]) < 1e-14);

    auto [op2, grid2] = laplace_1d(0.01, [](const Point&) { return -2.0; });
    auto g2 = std::make_shared<const ExteriorData>([](const Point& x) { return x[0] * x[0]; }, 4.0);
    const LatticeField u2 = LatticeField::sampled(grid2, g2, g2->g);
    const LatticeField v2 = sweep(op2, u2);
    for (std::size_t i = 0; i < u2.size(); ++i) CHECK(std::fabs(v2.values()[i] - u2.values()[i]) < 1e-14);

    auto gc = std::make_shared<const ExteriorData>(ExteriorData::constant(0.7));
    const LatticeField c = LatticeField::filled(grid, gc, 0.7);
    const LatticeField sc = sweep(op, c);
    for (double x : sc.values()) CHECK(x == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("solve_dpp examples") {
    auto [op, grid] = laplace_1d(0.01);
    auto gx = std::make_shared<const ExteriorData>([](const Point& x) { return x[0]; }, 2.0);
    const LatticeField init = LatticeField::filled(grid, gx, 0.0);
    auto [u, rep] = solve_dpp(op, init, {1e-9, 100000});
    CHECK(rep.converged);
    CHECK(rep.final_residual <= 1e-9);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::fabs(u.values()[i] - grid->node(i)[0]));
    // fixed-point error is at most residual / (1 - contraction)
    CHECK(err <= 1e-9 * 100);
    CHECK(rep.residual_history.size() == static_cast<std::size_t>(rep.iterations + 1));

    auto [u0, rep0] = solve_dpp(op, init, {1e-9, 0});
    CHECK_FALSE(rep0.converged);
    CHECK(u0.values() == init.values());
}

TEST_CASE("heat fixed point on the space-time lattice") {
    SchemeParams P;
    P.rho = 0.04;
    OperatorSpec op = OperatorSpec::make(Family::heat, P);
    const double h = coupled_h(op), ht = coupled_ht(op);
    op = op.with_lattice(h, ht);
    CHECK(op.lattice_aligned());
    auto grid = make_grid(op, Domain::interval(0.0, 1.0), h, 0.2, ht);
    auto g = std::make_shared<const ExteriorData>([](const Point& x) { return x[0] * x[0] + 2.0 * x[1]; }, 10.0);
    const LatticeField exact = LatticeField::sampled(grid, g, g->g);
    auto [u, rep] = solve_dpp(op, exact, {1e-9, 10});
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(rep.final_residual <= 1e-12);
    auto [w, rep2] = solve_dpp(op, LatticeField::filled(grid, g, 0.0), {1e-10, 100000});
    CHECK(rep2.converged);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::fabs(w.values()[i] - exact.values()[i]) < 1e-9);
}

TEST_CASE("monotone_solve examples") {
    auto [op, grid] = laplace_1d(0.02);
    auto g = std::make_shared<const ExteriorData>([](const Point& x) { return std::sin(3.0 * x[0]); }, 1.0);
    auto [a, ra] = monotone_solve(op, LatticeField::filled(grid, g, -2.0), {1e-10, 100000});
    CHECK(ra.converged);
    CHECK(ra.precondition_ok);
    CHECK(ra.monotone);
    auto [b, rb] = solve_dpp(op, LatticeField::filled(grid, g, 0.0), {1e-10, 100000});
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a.values()[i] - b.values()[i]));
    CHECK(d < 1e-8);

    auto [c, rc] = monotone_solve(op, a, {1e-9, 10});
    CHECK(rc.iterations == 0);
    auto [e, re] = monotone_solve(op, LatticeField::filled(grid, g, 5.0), {1e-6, 3});
    CHECK_FALSE(re.precondition_ok);
    CHECK(re.precondition_violation > 1.0);
}

TEST_CASE("compare_with_barrier examples") {
    auto [op, grid] = laplace_1d(0.02);
    auto g = std::make_shared<const ExteriorData>(ExteriorData::constant(0.0));
    const FieldEval bar = [](const Point& x) { return 1.0 - x[0] * x[0]; };
    const LatticeField u = LatticeField::sampled(grid, g, bar);
    auto v = compare_with_barrier(u, bar, Side::upper);
    CHECK(v.holds);
    CHECK(v.max_violation == 0.0);
    const LatticeField w = LatticeField::sampled(grid, g, [&](const Point& x) { return bar(x) + 1.0; });
    auto v2 = compare_with_barrier(w, bar, Side::upper);
    CHECK_FALSE(v2.holds);
    CHECK(v2.max_violation == doctest::Approx(1.0));
}

TEST_CASE("sweep is monotone and nonexpansive on random pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
    SchemeParams S;
    S.rho = 0.01;
    S.dim = 2;
    S.p = 4.0;
    S.f = [](const Point& x) { return x[0]; };
    OperatorSpec op = OperatorSpec::make(Family::normalized_p, S);
    op = op.with_lattice(coupled_h(op));
    auto grid = make_grid(op, Domain::ball(Point{0.0, 0.0}, 0.3), coupled_h(op));
    auto g = std::make_shared<const ExteriorData>([](const Point& x) { return std::cos(x[1]); }, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(grid->size()), b(grid->size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = U(rng);
            b[i] = a[i] + 0.2 * P(rng);
        }
        const LatticeField A(grid, g, a), B(grid, g, b);
        const LatticeField SA = sweep(op, A), SB = sweep(op, B);
        double din = 0.0, dout = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(SA.values()[i] <= SB.values()[i] + 1e-15);
            din = std::max(din, std::fabs(a[i] - b[i]));
            dout = std::max(dout, std::fabs(SA.values()[i] - SB.values()[i]));
        }
        CHECK(dout <= din + 1e-15);
        CHECK(SA(Point{0.5, 0.2}) == g->g(Point{0.5, 0.2}));
    }
}

TEST_CASE("exterior samples avoid the region") {
    const LatticeGrid g = LatticeGrid::over(Domain::interval(0.0, 1.0), 0.1);
    const auto pts = exterior_samples(g, 0.5);
    CHECK(!pts.empty());
    for (const Point& x : pts) CHECK_FALSE(g.inside(x));
}

TEST_CASE("iteration matches repeated sweeps exactly") {
    auto check = [](const OperatorSpec& op, std::shared_ptr<const LatticeGrid> grid) {
        auto gx = std::make_shared<const ExteriorData>([](const Point& x) { return std::sin(3.0 * x[0]) + x[x.dim() - 1]; }, 2.0);
        const LatticeField u0 = LatticeField::sampled(grid, gx, [](const Point& x) { return std::cos(5.0 * x[0]); });
        LatticeField ref = u0;
        for (int k = 0; k < 3; ++k) ref = sweep(op, ref);
        SolveOptions o;
        o.tol = 1e-300;
        o.max_iter = 3;
        const auto [u, rep] = solve_dpp(op, u0, o);
        CHECK(rep.iterations == 3);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(u.values()[i] == ref.values()[i]);
    };
    SchemeParams P;
    P.dim = 2;
    P.rho = 0.05;
    for (Family fam : {Family::laplacian, Family::normalized_p, Family::implicit_p}) {
        P.p = 4.0;
        OperatorSpec op = OperatorSpec::make(fam, P);
        const double h = coupled_h(op);
        op = op.with_lattice(h);
        check(op, make_grid(op, Domain::ball(Point{0.0, 0.0}, 0.5), h));
    }
    SchemeParams H;
    H.rho = 0.05;
    OperatorSpec heat = OperatorSpec::make(Family::heat, H);
    const double h = coupled_h(heat), ht = coupled_ht(heat);
    heat = heat.with_lattice(h, ht);
    check(heat, make_grid(heat, Domain::interval(0.0, 1.0), h, 0.3, ht));
    SchemeParams F;
    F.rho = 0.05;
    F.s = 0.6;
    OperatorSpec frac = OperatorSpec::make(Family::fractional, F);
    check(frac, make_grid(frac, Domain::interval(0.0, 1.0), 0.05));
}
