#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvs/domain.hpp"
#include "mvs/operators.hpp"
#include "mvs/test_function.hpp"

namespace mvs {

enum class BarrierSign { super, sub };

struct NamedConstant {
    std::string name;
    double value;
    std::string source;
};

struct BarrierSpec {
    Family family = Family::laplacian;
    int dim = 1;          // space dimension
    double R = 0.0;       // enclosing radius
    Point center;         // center of B_R (laplacian, heat, fractional families)
    Point x0;             // offset center (p families)
    BarrierSign sign = BarrierSign::super;
    double p = 2.0;
    double s = 0.5;

    /// Geometry chosen from the domain and its halo so that the invariants hold.
    static BarrierSpec for_domain(const OperatorSpec& op, const Domain& domain, BarrierSign sign = BarrierSign::super);
};

struct Barrier {
    TestFunction fn;
    std::vector<NamedConstant> constants;
    std::string id;
};

/// Classical strict supersolution (or its negation) for the family.
Barrier build_barrier(const BarrierSpec& spec, const Domain& domain, double f_bound, double g_bound);

struct BarrierCheck {
    bool holds = false;
    double min_margin = 0.0;  // min of A (super) or of -A (sub) over the sample nodes
    double rho = 0.0;
    std::size_t nodes = 0;
};

/// A(x, barrier, barrier(x)) >= delta (super) or <= -delta (sub) at every sample node.
BarrierCheck verify_strict_barrier(const OperatorSpec& op, const TestFunction& barrier, double delta,
                                   const std::vector<Point>& nodes, BarrierSign sign = BarrierSign::super);

struct Rho0Result {
    double rho0 = 0.0;        // largest rho found at which the check passes
    bool found = false;
    BarrierCheck at_rho0;
    std::vector<std::pair<double, double>> scan;  // (rho, min margin)
};

/// Scan dyadic rho downward from rho_max, then bisect in log rho between the last failure and
/// the first success.
Rho0Result find_rho0(const OperatorSpec& op, const TestFunction& barrier, double delta, const std::vector<Point>& nodes,
                     BarrierSign sign, double rho_max = 0.5, double rho_min = 1e-6, int bisection_steps = 12);

/// Sample nodes for barrier checks: domain points, with times in (0, T] appended for heat.
std::vector<Point> barrier_nodes(const OperatorSpec& op, const Domain& domain, int count, double T = 1.0);

}  // namespace mvs
