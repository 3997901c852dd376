#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mvs/domain.hpp"
#include "mvs/operators.hpp"
#include "mvs/solver.hpp"
#include "mvs/test_function.hpp"

namespace mvs {

/// Continuum operator F(x, phi) including the source, so that A_rho(x, phi, phi(x)) -> F.
struct PdeOperator {
    std::string id;
    bool reference = false;  // nonlocal term from a fine reference quadrature, not a closed form
    std::function<double(const TestFunction&, const Point&)> eval;
};

PdeOperator pde_operator(const OperatorSpec& op, const TestFunction& tf);

/// Reference quadrature for the nonlocal part (truncation 1e-4, refined panels, near-field Taylor term).
double reference_nonlocal(const OperatorSpec& op, const TestFunction& tf, const Point& x);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    bool sentinel = false;
    std::string note;
};

/// Least squares on (log scale, log error). A zero error gives slope +inf with a note.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

struct ConsistencyRow {
    double rho = 0.0;
    double scale = 0.0;       // rho, or the truncation radius for nonlocal families
    double sup_lambda = 0.0;  // sup over nodes of |Lambda(x, rho)|
    double noise = 0.0;       // sup over nodes of |Lambda - Lambda_refined|
    bool flagged = false;     // noise > 0.1 sup |Lambda|
};

struct ConsistencyReport {
    std::string family;
    std::string tf_id;
    std::string F_id;
    bool F_reference = false;
    std::string scale_name = "rho";
    std::string nodes;
    std::vector<ConsistencyRow> rows;
    RateFit fit;
    std::vector<std::string> notes;
};

/// Lambda(x, rho) = A_rho(x, tf, tf(x)) - F(x, tf) over the nodes for each rho.
ConsistencyReport consistency_error(const OperatorSpec& op, const TestFunction& tf, const PdeOperator& F,
                                    const std::vector<Point>& nodes, const std::vector<double>& rhos,
                                    std::string nodes_desc = "");

struct ConvergenceRow {
    double rho = 0.0;
    double h = 0.0;
    double sup_error = 0.0;
    int iters = 0;
    bool converged = false;
    double residual = 0.0;
};

struct ConvergenceReport {
    std::string family;
    std::string exact_id;
    double exact_residual = 0.0;  // sup |F(exact)| at sample nodes
    std::vector<ConvergenceRow> rows;
    bool monotone_decrease = false;  // errors strictly decrease along the rho list
};

/// Solve the DPP with coupled h for each rho and measure the sup node error against `exact`.
/// `g` defaults to the exact solution outside the domain. T > 0 selects the heat cylinder.
ConvergenceReport convergence_study(const OperatorSpec& op, const Domain& domain, const TestFunction& exact,
                                    const std::vector<double>& rhos, const SolveOptions& opts = {},
                                    std::shared_ptr<const ExteriorData> g = nullptr, double T = 0.0);

enum class ContactSide { sub, super };

struct MVPConfig {
    double omega_power = 2.0;  // omega(rho) = rho^q
    std::vector<double> rhos;  // empty: 8 dyadic values from 1e-1
    int tail = 3;              // limsup/liminf over the last `tail` values
    double tau = 0.1;
    double contact_radius = 0.25;
    int contact_samples = 64;
};

struct MVPReport {
    Point x0;
    ContactSide side = ContactSide::sub;
    std::vector<double> rhos;
    std::vector<double> values_plus;   // A_rho(x0, phi, phi(x0) + omega)
    std::vector<double> values_minus;  // A_rho(x0, phi, phi(x0) - omega)
    double limsup = 0.0;
    double liminf = 0.0;
    bool pass = false;
};

/// Asymptotic mean value check at x0 for phi touching u from the given side.
MVPReport mvp_check(const OperatorSpec& op, const FieldEval& u, const Point& x0, const TestFunction& phi,
                    ContactSide side, const MVPConfig& cfg = {});

struct CalibrationRow {
    double rho = 0.0;
    double C_fit = 0.0;
};

/// Median over nodes of rho (-Delta_p tf) / sum_i w_i J_p(tf(x) - tf(x + z_i)) for implicit_p.
std::vector<CalibrationRow> calibrate_C(const OperatorSpec& op, const TestFunction& tf,
                                        const std::vector<Point>& nodes, const std::vector<double>& rhos);

/// rho_0 2^{-k}, k = 0..count-1.
std::vector<double> dyadic(double rho0, int count);

}  // namespace mvs
