#pragma once

#include <vector>

namespace mvs {

/// One-dimensional quadrature rule: nodes and weights.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss rule on [0,1] for the weight t^beta (beta > -1), weights normalized to sum 1.
/// Exact for polynomials of degree <= 2n-1 against the normalized weight.
Rule1D gauss_jacobi_unit(int n, double beta);

/// Gauss-Legendre on [a,b]; weights sum to b-a.
Rule1D gauss_legendre(int n, double a, double b);

}  // namespace mvs
