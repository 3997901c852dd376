#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvs/field.hpp"
#include "mvs/operators.hpp"

namespace mvs {

struct BarrierVerdict {
    std::string id;
    bool holds = false;
    double max_violation = 0.0;
};

struct SolveReport {
    bool converged = false;
    double final_residual = -1.0;  // negative when no sweep ran
    int iterations = 0;
    double sup_norm = 0.0;
    double tol = 0.0;
    std::vector<double> residual_history;
    bool monotone = true;          // every sweep ascended within slack (monotone_solve)
    double max_descent = 0.0;      // largest u^k - u^{k+1} observed
    bool precondition_ok = true;   // initial field was a subsolution within slack
    double precondition_violation = 0.0;
    double slack = 0.0;
    std::vector<BarrierVerdict> barriers;
    double wall_time = 0.0;
    std::string sweep_order = "jacobi";
};

struct SolveOptions {
    double tol = 1e-9;
    int max_iter = 100000;
    bool gauss_seidel = false;
};

/// One application of the averaging operator at every interior node (Jacobi order).
LatticeField sweep(const OperatorSpec& spec, const LatticeField& u);

/// Fixed-point iteration u <- sweep(u) until sup |sweep(u) - u| <= tol.
std::pair<LatticeField, SolveReport> solve_dpp(const OperatorSpec& spec, const LatticeField& init,
                                               const SolveOptions& opts = {});

/// Picard iteration from a subsolution; iterates must ascend within the slack.
std::pair<LatticeField, SolveReport> monotone_solve(const OperatorSpec& spec, const LatticeField& sub,
                                                    const SolveOptions& opts = {});

/// Slack used by monotonicity assertions: 10 (root tolerance + quadrature tail bound).
double monotone_slack(const OperatorSpec& spec);

enum class Side { upper, lower };

/// u <= barrier (upper) or u >= barrier (lower) at every node and at the exterior samples,
/// where u equals the exterior datum.
BarrierVerdict compare_with_barrier(const LatticeField& u, const FieldEval& barrier, Side side,
                                    const std::vector<Point>& exterior_samples = {}, std::string id = "barrier");

/// Lattice spacing coupled to the averaging radius: radius / 8.
double coupled_h(const OperatorSpec& spec);
/// Time step for heat lattices: the backward window split into four steps.
double coupled_ht(const OperatorSpec& spec);

/// Lattice over the domain (space-time cylinder up to T for heat).
std::shared_ptr<const LatticeGrid> make_grid(const OperatorSpec& spec, const Domain& domain, double h,
                                             double T = 0.0, double ht = 0.0);

/// Lattice points outside the region within `width` of its bounding box (for exterior checks).
std::vector<Point> exterior_samples(const LatticeGrid& grid, double width, std::size_t max_count = 2000);

}  // namespace mvs
