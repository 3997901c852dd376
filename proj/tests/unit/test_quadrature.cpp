#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mvs/errors.hpp"
#include "mvs/quadrature.hpp"
#include "mvs/special.hpp"

using namespace mvs;

namespace {

double wsum(const std::vector<double>& w) { return static_cast<double>(std::accumulate(w.begin(), w.end(), 0.0L)); }

// Monte Carlo average of |z|^2 z_1^2 style moments over the unit ball.
double mc_ball_moment(int dim, int e0, int e1, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double acc = 0.0;
    int hit = 0;
    while (hit < samples) {
        Point z(dim);
        for (int i = 0; i < dim; ++i) z[i] = U(rng);
        if (norm2(z) >= 1.0) continue;
        ++hit;
        acc += std::pow(z[0], e0) * std::pow(z[dim - 1], e1);
    }
    return acc / hit;
}

}  // namespace

TEST_CASE("ball_average examples") {
    const double rho = 0.04;
    const BallRule r = BallRule::gauss(1, std::sqrt(rho));
    CHECK(wsum(r.weights) == doctest::Approx(1.0).epsilon(1e-14));
    const Point x{0.37};
    CHECK(ball_average(r, [](const Point&) { return 2.5; }, x) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(ball_average(r, [](const Point& y) { return 3.0 * y[0] - 1.0; }, x) == doctest::Approx(3.0 * 0.37 - 1.0));
    CHECK(ball_average(r, [](const Point& y) { return y[0] * y[0]; }, x) ==
          doctest::Approx(0.37 * 0.37 + rho / 3.0).epsilon(1e-14));
    // dense midpoint oracle for the same average
    const int m = 100000;
    double acc = 0.0;
    const double rr = std::sqrt(rho);
    for (int i = 0; i < m; ++i) {
        const double y = 0.37 - rr + (i + 0.5) * 2.0 * rr / m;
        acc += y * y;
    }
    CHECK(acc / m == doctest::Approx(0.37 * 0.37 + rho / 3.0).epsilon(1e-9));
}

TEST_CASE("gauss ball rules reproduce ball moments") {
    for (int dim : {2, 3}) {
        const BallRule r = BallRule::gauss(dim, 1.0, 6, 12);
        CHECK(r.degree >= 2);
        for (double w : r.weights) CHECK(w >= 0.0);
        CHECK(wsum(r.weights) == doctest::Approx(1.0).epsilon(1e-14));
        auto mom = [&](int e0, int e1) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * std::pow(r.nodes[i][0], e0) * std::pow(r.nodes[i][dim - 1], e1);
            return s;
        };
        CHECK(mom(2, 0) == doctest::Approx(1.0 / (dim + 2.0)).epsilon(1e-13));
        CHECK(std::fabs(mom(1, 1)) < 1e-15);
        CHECK(std::fabs(mom(3, 0)) < 1e-15);
        CHECK(mom(4, 0) == doctest::Approx(mc_ball_moment(dim, 4, 0, 5, 400000)).epsilon(2e-2));
        CHECK(mom(2, 2) == doctest::Approx(mc_ball_moment(dim, 2, 2, 6, 400000)).epsilon(2e-2));
    }
}

TEST_CASE("lattice ball rule is exact on quadratics") {
    for (int dim : {1, 2, 3}) {
        Point h(dim);
        for (int i = 0; i < dim; ++i) h[i] = 0.01;
        for (double mult : {2.0, 3.0, 8.0}) {
            const double r = mult * 0.01;
            const BallRule b = BallRule::lattice(h, r);
            for (double w : b.weights) CHECK(w >= 0.0);
            CHECK(wsum(b.weights) == doctest::Approx(1.0).epsilon(1e-14));
            double m2 = 0.0, m11 = 0.0, m1 = 0.0;
            for (std::size_t i = 0; i < b.nodes.size(); ++i) {
                m2 += b.weights[i] * b.nodes[i][0] * b.nodes[i][0];
                m1 += b.weights[i] * b.nodes[i][0];
                if (dim > 1) m11 += b.weights[i] * b.nodes[i][0] * b.nodes[i][1];
            }
            CHECK(m2 == doctest::Approx(r * r / (dim + 2.0)).epsilon(1e-12));
            CHECK(std::fabs(m1) < 1e-17);
            CHECK(std::fabs(m11) < 1e-17);
        }
    }
    CHECK_THROWS_AS(BallRule::lattice(Point{0.1}, 0.15), ConfigError);
}

TEST_CASE("ball_extrema examples") {
    const double r = 0.3;
    const ExtremaSet e = ExtremaSet::dense(2, r);
    const Point x{0.2, -0.1};
    const Point a{1.0, 2.0};
    auto [hi, lo] = ball_extrema(e, [&](const Point& y) { return dot(a, y) + 0.5; }, x);
    const double exact = dot(a, x) + 0.5 + norm(a) * r;
    CHECK(hi <= exact);
    CHECK(hi >= exact - norm(a) * r * (2.0 * special::kPi / 4096.0));
    CHECK(lo >= dot(a, x) + 0.5 - norm(a) * r);
    auto [c1, c2] = ball_extrema(e, [](const Point&) { return 7.0; }, x);
    CHECK(c1 == 7.0);
    CHECK(c2 == 7.0);
    // |y - x| over radius rho: refined brute force oracle
    const double rho = 0.05;
    const ExtremaSet e1 = ExtremaSet::dense(1, rho);
    auto [d1, d0] = ball_extrema(e1, [&](const Point& y) { return std::fabs(y[0] - 0.3); }, Point{0.3});
    CHECK(d1 <= rho);
    CHECK(d1 >= rho - 1e-15);
    CHECK(d0 == 0.0);
}

TEST_CASE("annulus rule normalization against the stable measure") {
    const RadialDensity mu{0.75, 0.0};
    PanelConfig cfg;
    const RadialPanels p = radial_panels(mu, 1.0, cfg);
    CHECK(2.0 * p.mass == doctest::Approx(2.0 / 1.5).epsilon(1e-7));
    CHECK(p.tail_bound <= 1e-8);
    CHECK(std::pow(1.0 / p.R_tail, 1.5) <= p.tail_bound * (1.0 + 1e-12));
    const AnnulusRule a = AnnulusRule::build(1, mu, 0.1, cfg);
    CHECK(wsum(a.weights) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.mass == doctest::Approx(2.0 * std::pow(0.1, -1.5) / 1.5).epsilon(1e-7));
    for (const Point& z : a.nodes) CHECK(norm(z) > 0.1);
    const Point x{0.4};
    CHECK(levy_annulus_average(a, [](const Point&) { return -1.5; }, x) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(levy_annulus_average(a, [&](const Point& y) { return 2.0 * (y[0] - 0.4) + 1.0; }, x) ==
          doctest::Approx(1.0).epsilon(1e-9));
    const AnnulusRule a2 = AnnulusRule::build(2, mu, 0.1, cfg);
    CHECK(wsum(a2.weights) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a2.mass == doctest::Approx(2.0 * special::kPi * std::pow(0.1, -1.5) / 1.5).epsilon(1e-7));
    PanelConfig tight = cfg;
    tight.max_radius = 10.0;
    CHECK_THROWS_AS(radial_panels(mu, 0.1, tight), ConfigError);
}

TEST_CASE("tempered density mass") {
    const RadialDensity mu{0.5, 2.0};
    // int_1^inf r^{-2} e^{-2r} dr = e^{-2} - 2 E1(2)
    const double e1_2 = 0.04890051070806112;
    CHECK(mu.mass_beyond(1.0) == doctest::Approx(std::exp(-2.0) - 2.0 * e1_2).epsilon(1e-9));
}

TEST_CASE("ray_average examples") {
    const double s = 0.75, eps = 0.05;
    const RayRule r = RayRule::build(s, eps, PanelConfig{});
    CHECK(wsum(r.weights) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ray_average(r, [](const Point&) { return 4.0; }, Point{0.0}, Point{1.0}) == doctest::Approx(4.0));
    const double m = ray_average(r, [](const Point& y) { return y[0]; }, Point{0.0}, Point{1.0});
    // truncated analytic oracle, then the untruncated value within the truncation term
    const double R = r.R_tail;
    const double trunc = (std::pow(eps, 1.0 - 2 * s) - std::pow(R, 1.0 - 2 * s)) / (2 * s - 1.0) /
                         ((std::pow(eps, -2 * s) - std::pow(R, -2 * s)) / (2 * s));
    CHECK(m == doctest::Approx(trunc).epsilon(1e-9));
    CHECK(m == doctest::Approx(2 * s * eps / (2 * s - 1.0)).epsilon(2.0 * std::pow(eps / R, 2 * s - 1.0)));
    CHECK_THROWS_AS(RayRule::build(0.5, eps, PanelConfig{}), ConfigError);
}

TEST_CASE("direction sets") {
    CHECK(DirectionSet::make(1).dirs.size() == 2u);
    for (int dim : {2, 3}) {
        const DirectionSet d = DirectionSet::make(dim);
        CHECK(d.dirs.size() == (dim == 2 ? 64u : 256u));
        for (const Point& y : d.dirs) CHECK(std::fabs(norm(y) - 1.0) < 1e-14);
    }
}

TEST_CASE("cylinder_average examples") {
    const double rho = 0.09, t = 0.8;
    const CylinderRule c = CylinderRule::gauss(1, rho);
    CHECK(c.window == doctest::Approx(rho / 3.0));
    const Point x{0.25};
    CHECK(cylinder_average(c, [](const Point&) { return 1.25; }, x, t) == doctest::Approx(1.25));
    CHECK(cylinder_average(c, [](const Point& y) { return y[1]; }, x, t) == doctest::Approx(t - rho / 6.0));
    CHECK(cylinder_average(c, [](const Point& y) { return y[0] * y[0] + 2.0 * y[1]; }, x, t) ==
          doctest::Approx(x[0] * x[0] + 2.0 * t).epsilon(1e-14));
    const CylinderRule cl = CylinderRule::lattice(Point{0.0375}, 0.01, rho);
    CHECK(cylinder_average(cl, [](const Point& y) { return y[0] * y[0] + 2.0 * y[1]; }, x, t) ==
          doctest::Approx(x[0] * x[0] + 2.0 * t).epsilon(1e-14));
    CHECK_THROWS_AS(CylinderRule::lattice(Point{0.0375}, 0.007, rho), ConfigError);
}

TEST_CASE("averages preserve ordering on 100 random pairs") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
    const BallRule b = BallRule::gauss(2, 0.2);
    const ExtremaSet e = ExtremaSet::dense(2, 0.2, 256);
    const AnnulusRule a = AnnulusRule::build(2, RadialDensity{0.6, 0.0}, 0.05, PanelConfig{}, 16);
    const RayRule r = RayRule::build(0.8, 0.05, PanelConfig{});
    for (int trial = 0; trial < 100; ++trial) {
        const double k1 = 3 * U(rng), k2 = 3 * U(rng), shift = P(rng), c = U(rng);
        FieldEval A = [=](const Point& y) { return std::sin(k1 * y[0] + k2 * y[1]) + c; };
        FieldEval B = [=](const Point& y) { return std::sin(k1 * y[0] + k2 * y[1]) + c + shift * (1.0 + y[0] * y[0]); };
        const Point x{U(rng), U(rng)};
        CHECK(ball_average(b, A, x) <= ball_average(b, B, x));
        CHECK(ball_extrema(e, A, x).first <= ball_extrema(e, B, x).first);
        CHECK(ball_extrema(e, A, x).second <= ball_extrema(e, B, x).second);
        CHECK(levy_annulus_average(a, A, x) <= levy_annulus_average(a, B, x));
        CHECK(ray_average(r, A, x, Point{0.6, 0.8}) <= ray_average(r, B, x, Point{0.6, 0.8}));
    }
}

TEST_CASE("refinement changes averages of catalog functions only slightly") {
    auto f = [](const Point& y) { return std::exp(-y[0] * y[0]) * std::cos(2.0 * y[0]); };
    const Point x{0.3};
    const AnnulusRule a = AnnulusRule::build(1, RadialDensity{0.75, 0.0}, 0.05, PanelConfig{});
    const AnnulusRule a2 = AnnulusRule::build(1, RadialDensity{0.75, 0.0}, 0.05, PanelConfig{}.refined());
    CHECK(std::fabs(levy_annulus_average(a, f, x) - levy_annulus_average(a2, f, x)) < 1e-9);
    const BallRule b = BallRule::gauss(1, 0.3, 8), b2 = BallRule::gauss(1, 0.3, 16);
    CHECK(std::fabs(ball_average(b, f, x) - ball_average(b2, f, x)) < 1e-13);
}
