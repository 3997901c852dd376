#include "mvs/special.hpp"

#include <cmath>

#include "mvs/errors.hpp"

namespace mvs::special {

double sphere_area(int dim) {
    return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double ball_volume(int dim) { return sphere_area(dim) / dim; }

double frac_laplacian_constant(int dim, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0,1)");
    return std::pow(4.0, s) * std::tgamma(0.5 * dim + s) /
           (std::pow(kPi, 0.5 * dim) * std::fabs(std::tgamma(-s)));
}

double frac_barrier_constant(int dim, double s) {
    return std::pow(2.0, -2.0 * s) * std::tgamma(0.5 * dim) /
           (std::tgamma(0.5 * (dim + 2.0 * s)) * std::tgamma(1.0 + s));
}

double ball_abs_moment(int dim, double p) {
    const double n = dim;
    return n / (n + p) * std::tgamma(0.5 * n) * std::tgamma(0.5 * (p + 1.0)) /
           (std::sqrt(kPi) * std::tgamma(0.5 * (n + p)));
}

double implicit_p_moment_constant(int dim, double p) { return 2.0 / ball_abs_moment(dim, p); }

double hyp1f1_neg(double a, double b, double x) {
    if (x < 0.0) throw ConfigError("hyp1f1_neg expects x >= 0");
    if (x > 600.0) {
        // Large-argument expansion; the exponentially small companion term is dropped.
        double sum = 1.0, term = 1.0;
        for (int k = 0; k < 30; ++k) {
            term *= (a + k) * (1.0 + a - b + k) / ((k + 1.0) * x);
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        return std::tgamma(b) / std::tgamma(b - a) * std::pow(x, -a) * sum;
    }
    // Kummer transform: 1F1(a;b;-x) = e^{-x} 1F1(b-a;b;x); the series on the right has no
    // cancellation for the parameter ranges used here.
    const double ap = b - a;
    double sum = 1.0, term = 1.0;
    for (int k = 0; k < 2000; ++k) {
        term *= (ap + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum) && k > x) break;
    }
    return std::exp(-x) * sum;
}

double frac_laplacian_gaussian(int dim, double s, double r2) {
    const double half = 0.5 * dim;
    return std::pow(4.0, s) * std::tgamma(half + s) / std::tgamma(half) *
           hyp1f1_neg(half + s, half, r2);
}

}  // namespace mvs::special
