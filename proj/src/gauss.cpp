#include "mvs/gauss.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "mvs/errors.hpp"

namespace mvs {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1].
Rule1D golub_welsch_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw ConfigError("Gauss rule needs at least one node");
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * k + ab;
        double a;
        if (k == 0)
            a = (beta - alpha) / (ab + 2.0);
        else
            a = (beta * beta - alpha * alpha) / (t * (t + 2.0));
        jac(k, k) = a;
        if (k + 1 < n) {
            const double m = k + 1.0;
            const double tm = 2.0 * m + ab;
            double b = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) /
                       (tm * tm * (tm + 1.0) * (tm - 1.0));
            jac(k, k + 1) = jac(k + 1, k) = std::sqrt(b);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = v0 * v0;
    }
    return r;
}

}  // namespace

Rule1D gauss_jacobi_unit(int n, double beta) {
    Rule1D r = golub_welsch_jacobi(n, 0.0, beta);
    const double total = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
        r.weights[i] /= total;
    }
    return r;
}

Rule1D gauss_legendre(int n, double a, double b) {
    Rule1D r = golub_welsch_jacobi(n, 0.0, 0.0);
    const double total = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = a + 0.5 * (r.nodes[i] + 1.0) * (b - a);
        r.weights[i] *= (b - a) / total;
    }
    return r;
}

}  // namespace mvs
