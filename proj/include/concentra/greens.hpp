#pragma once

#include <vector>

#include "concentra/numerics.hpp"
#include "concentra/point.hpp"

namespace concentra {

struct Domain {
  enum class Kind { UnitBall, Annulus };
  Kind kind = Kind::UnitBall;
  double a = 0.0;  // inner radius, annulus only

  static Domain unit_ball() { return {Kind::UnitBall, 0.0}; }
  static Domain annulus(double inner);  // throws DomainError unless 0 < inner < 1

  double inner_radius() const { return kind == Kind::Annulus ? a : 0.0; }
  double thickness() const { return 1.0 - inner_radius(); }
  bool contains(const Point3& x) const;
  double boundary_distance(const Point3& x) const;
};

/// First Dirichlet eigenvalue of -Laplacian.
double lambda1(const Domain& d);

struct GreenEval {
  double value = 0.0;
  int order = 0;            // truncation order L
  double tail_bound = 0.0;  // bound on the discarded modes
};

struct ModeCoefficients {
  std::vector<double> c;  // smooth part = sum_l c[l] P_l(cos gamma)
  double ratio = 0.0;     // geometric convergence ratio
  double tail = 0.0;
  int order = 0;
};

/// Radial mode coefficients for |x| = s, |y| = t; independent of the angle between x and y.
ModeCoefficients mode_coefficients(const Domain& d, double lambda, double s, double t, double tol);

/// sum_l c[l] P_l(x) by the three-term recurrence.
double sum_legendre(const std::vector<double>& c, double x);

/// Interior Helmholtz solution with boundary data cos(k|x-y|)/(4 pi |x-y|), k = sqrt(lambda).
GreenEval smooth_part(const Domain& d, double lambda, const Point3& x, const Point3& y, double tol);

GreenEval green(const Domain& d, double lambda, const Point3& x, const Point3& y, double tol);

/// H = 1/(4 pi |x-y|) - G. At x == y this is the Robin function.
GreenEval regular_part(const Domain& d, double lambda, const Point3& x, const Point3& y,
                       double tol);

GreenEval robin(const Domain& d, double lambda, const Point3& x, double tol);

/// Largest mode order the engine will sum before refusing.
inline constexpr int kMaxModeOrder = 10000;

// Closed-form lambda = 0 annulus series.

enum class SeriesWeighting {
  Multiplicity,  // sum (2m+1) P_m
  AsPrinted,     // sum P_m
};

/// The m-th radial term P_m(|x|) for the annulus a < |x| < 1.
double annulus_series_term(double a, int m, double t);

struct SeriesEval {
  double value = 0.0;
  double omega2 = 0.0;  // calibrated normalization
  int terms = 0;
  double tail_bound = 0.0;
};

/// Normalization making the series match the mode engine at the midpoint radius (1+a)/2.
double calibrate_omega2(double a, SeriesWeighting weighting);

SeriesEval annulus_g0_series(double a, const Point3& x, double tol,
                             SeriesWeighting weighting = SeriesWeighting::Multiplicity);

SeriesEval annulus_G0_antipodal(double a, const Point3& x, double tol,
                                SeriesWeighting weighting = SeriesWeighting::Multiplicity);

// Lambda derivatives.

using Derivative = numerics::FiniteDifference;

/// Central difference with one Richardson level; h <= 0 selects 1e-4 * lambda1.
Derivative d_lambda_robin(const Domain& d, double lambda, const Point3& x, double h = 0.0,
                          double tol = 1e-14);

Derivative d_lambda_green(const Domain& d, double lambda, const Point3& x, const Point3& y,
                          double h = 0.0, double tol = 1e-14);

}  // namespace concentra
