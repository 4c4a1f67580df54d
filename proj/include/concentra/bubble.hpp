#pragma once

#include "concentra/point.hpp"

namespace concentra {

/// 3^(1/4).
inline constexpr double kAlpha3 = 1.3160740129524924608;

struct BubbleParams {
  double mu = 1.0;  // concentration rate, > 0
  Point3 center{0.0, 0.0, 0.0};
};

/// w(x) = alpha3 mu^(1/2) (mu^2 + |x - center|^2)^(-1/2)
double eval_bubble(const BubbleParams& p, const Point3& x);

struct BubbleKernels {
  double z1 = 0.0, z2 = 0.0, z3 = 0.0;  // derivatives with respect to the center
  double z4 = 0.0;                      // derivative with respect to mu
};

BubbleKernels eval_bubble_kernels(const BubbleParams& p, const Point3& x);

/// Closed-form Laplacian of the bubble in x.
double bubble_laplacian(const BubbleParams& p, const Point3& x);

struct ConstantPair {
  double closed_form = 0.0;
  double quadrature = 0.0;
  double error_estimate = 0.0;
  double relative_error() const;
};

struct EnergyConstants {
  ConstantPair a0, a1, a2, a3;

  /// Closed forms only, no quadrature.
  static EnergyConstants closed_forms();
};

/// Evaluates the four defining integrals by radial quadrature. The a2 closed form is the
/// printed (alpha3 pi)^2; any mismatch shows up in relative_error().
EnergyConstants compute_constants(double tol = 1e-12);

/// Integral of w^power over R^3 for a bubble at scale mu, power > 3.
double bubble_power_integral(double mu, int power, double tol);

struct BetaCheck {
  double quadrature = 0.0;
  double closed = 0.0;
};

/// int_0^inf (r/(1+r^2))^q r^(-alpha-1) dr against G((q-alpha)/2) G((q+alpha)/2) / (2 G(q)).
BetaCheck beta_integral_check(double q, double alpha);

/// Radial corrector: u'' + (2/rho) u' = lambda alpha3 (1/rho - (1+rho^2)^(-1/2)), u(inf) = 0.
/// Computed from u(rho) = -int_rho^inf s^-2 int_0^s t^2 f(t) dt ds.
double compute_D0(double rho, double lambda);

/// Same function in closed form.
double d0_closed_form(double rho, double lambda);

}  // namespace concentra
