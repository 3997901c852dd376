#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "mvs/domain.hpp"
#include "mvs/field.hpp"
#include "mvs/quadrature.hpp"

namespace mvs {

enum class Family { laplacian, heat, motivating, normalized_p, implicit_p, fractional, infinity_fractional, levy_generic };

std::string family_name(Family f);
Family family_from_name(const std::string& name);
bool is_nonlocal(Family f);

struct SchemeParams {
    double rho = 0.01;
    int dim = 1;  // space dimension N
    double p = 2.0;
    double s = 0.5;
    double alpha = 0.5;
    double gamma = 1.0;
    double lambda = 0.0;  // tempering of the generic Levy density
    double C = 0.0;       // implicit_p constant; 0 selects the moment formula
    FieldEval f;          // source; space-time argument for heat
    std::string f_id = "zero";
    double root_tol = 1e-12;
    int max_root_steps = 200;
};

struct QuadratureConfig {
    int ball_radial = 8;
    int ball_angular = 16;
    int ring = 4096;
    int directions = 0;  // 0: 64 in 2D, 256 in 3D
    int annulus_angular = 32;
    int time_nodes = 4;
    PanelConfig panels;
    double lattice_h = 0.0;   // > 0 aligns local rules with the solver lattice
    double lattice_ht = 0.0;  // heat time step for lattice cylinders

    QuadratureConfig refined() const;
};

struct RootStats {
    int steps = 0;
    int widenings = 0;
    double residual = 0.0;
};

/// One scheme family with its parameters and prebuilt quadrature. Immutable.
class OperatorSpec {
public:
    static OperatorSpec make(Family family, SchemeParams params, QuadratureConfig quad = {});

    OperatorSpec with_rho(double rho) const;
    OperatorSpec with_source(FieldEval f, std::string id) const;
    OperatorSpec with_lattice(double h, double ht = 0.0) const;
    OperatorSpec with_C(double C, std::string source) const;
    /// Same operator with doubled node counts.
    OperatorSpec refined() const;

    Family family() const { return family_; }
    const SchemeParams& params() const { return params_; }
    const QuadratureConfig& quad() const { return quad_; }
    int dim() const { return params_.dim; }
    int point_dim() const { return family_ == Family::heat ? params_.dim + 1 : params_.dim; }
    double rho() const { return params_.rho; }

    /// Coefficient K of s in A = K (s - a0) - f for explicit families; C/rho for implicit_p.
    double coefficient() const { return K_; }
    /// Averaging radius: sqrt(rho), gamma sqrt(rho), rho^{1/p} or the truncation radius.
    double radius() const { return radius_; }
    double implicit_C() const { return C_; }
    const std::string& C_source() const { return C_source_; }
    double tail_bound() const;
    double source(const Point& x) const { return params_.f ? params_.f(x) : 0.0; }
    /// Largest distance from x reached by the quadrature (infinite tails report R_tail).
    double reach() const;
    bool lattice_aligned() const { return lattice_aligned_; }

    const BallRule* ball() const { return ball_.get(); }
    const ExtremaSet* extrema() const { return extrema_.get(); }
    const AnnulusRule* annulus() const { return annulus_.get(); }
    const RayRule* ray() const { return ray_.get(); }
    const DirectionSet* directions() const { return dirs_.get(); }
    const CylinderRule* cylinder() const { return cyl_.get(); }

private:
    void build();

    Family family_ = Family::laplacian;
    SchemeParams params_;
    QuadratureConfig quad_;
    double K_ = 0.0, radius_ = 0.0, C_ = 0.0;
    std::string C_source_;
    bool lattice_aligned_ = false;
    std::shared_ptr<const BallRule> ball_;
    std::shared_ptr<const ExtremaSet> extrema_;
    std::shared_ptr<const AnnulusRule> annulus_;
    std::shared_ptr<const RayRule> ray_;
    std::shared_ptr<const DirectionSet> dirs_;
    std::shared_ptr<const CylinderRule> cyl_;
};

/// Explicit averaging part a0(x, phi) (the scheme mean without the source term).
double eval_average(const OperatorSpec& spec, const Point& x, const FieldEval& phi);

/// Directions attaining the largest and smallest ray average (infinity_fractional only).
std::pair<Point, Point> ray_extremal_directions(const OperatorSpec& spec, const Point& x, const FieldEval& phi);

/// A_rho(x, phi, s).
double eval_scheme(const OperatorSpec& spec, const Point& x, const FieldEval& phi, double s);

/// a_rho(x, phi): the unique root of s -> A_rho(x, phi, s).
double eval_mean(const OperatorSpec& spec, const Point& x, const FieldEval& phi, RootStats* stats = nullptr);

/// Root of the implicit_p scheme by safeguarded regula falsi on a sign-change bracket.
double solve_pointwise(const OperatorSpec& spec, const Point& x, const FieldEval& phi,
                       std::optional<std::pair<double, double>> bracket_hint = std::nullopt,
                       RootStats* stats = nullptr);

/// Root of s -> (C/rho) sum w_i J_p(s - v_i) - f for given node values.
double solve_implicit_root(const std::vector<double>& values, const std::vector<double>& weights, double p,
                           double C_over_rho, double f, double root_tol, int max_steps,
                           std::optional<std::pair<double, double>> bracket_hint = std::nullopt,
                           RootStats* stats = nullptr);

/// Boundary-absorbing operator: A_rho inside, s - g(x) outside.
double eval_boundary_scheme(const OperatorSpec& spec, const ExteriorData& g, const LatticeGrid::Predicate& inside,
                            const Point& x, const FieldEval& phi, double s);

/// Truncation radius eps with mu(|z| > eps) = 1/rho for the generic Levy density.
double levy_truncation(int dim, const RadialDensity& density, double rho);

}  // namespace mvs
