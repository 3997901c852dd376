#pragma once

// Closed-form constants and special functions used by the operator catalog.

namespace mvs::special {

inline constexpr double kPi = 3.14159265358979323846;

/// Surface area of the unit sphere in R^N, |dB_1| (N=1 gives 2).
double sphere_area(int dim);

/// Volume of the unit ball in R^N.
double ball_volume(int dim);

/// Normalization of the fractional Laplacian with Fourier symbol |xi|^{2s}:
/// c_{N,s} = 4^s Gamma(N/2+s) / (pi^{N/2} |Gamma(-s)|).
double frac_laplacian_constant(int dim, double s);

/// Amplitude making (R^2-|x|^2)_+^s a solution of (-Delta)^s u = 1 inside B_R:
/// 2^{-2s} Gamma(N/2) / (Gamma((N+2s)/2) Gamma(1+s)).
double frac_barrier_constant(int dim, double s);

/// Constant C for which (C/rho) avg_{B_{rho^{1/p}}} |t|^{p-2} t of increments approximates -Delta_p,
/// obtained from the second moment identity: C = 2 / avg_{B_1} |z_1|^p.
double implicit_p_moment_constant(int dim, double p);

/// avg_{B_1} |z_1|^p over the unit ball in R^N.
double ball_abs_moment(int dim, double p);

/// Kummer confluent hypergeometric 1F1(a; b; -x) for x >= 0.
double hyp1f1_neg(double a, double b, double x);

/// (-Delta)^s exp(-|y|^2) evaluated at |y|^2 = r2 (unit width, unit amplitude).
double frac_laplacian_gaussian(int dim, double s, double r2);

}  // namespace mvs::special
