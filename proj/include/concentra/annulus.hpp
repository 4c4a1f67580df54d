#pragma once

#include <optional>
#include <string>
#include <vector>

#include "concentra/bubble.hpp"
#include "concentra/greens.hpp"
#include "concentra/numerics.hpp"
#include "concentra/point.hpp"

namespace concentra {

struct PolygonConfig {
  int k = 2;
  double r = 0.5;
  double a = 0.1;
};

/// k points at radius r in the z = 0 plane, the first on the positive x axis.
std::vector<Point3> polygon_points(const PolygonConfig& c);

/// (g(zeta_1), -G(zeta_1, zeta_2), ..., -G(zeta_1, zeta_k)): the first row of the circulant matrix.
std::vector<double> polygon_first_row(double a, int k, double lambda, double r, double tol);

/// g(zeta_1) - sum_{j>1} G(zeta_1, zeta_j).
double sigma1_polygon(double a, int k, double lambda, double r, double tol);

/// Chebyshev radii on [a + m, 1 - m] with m = 0.04 (1 - a).
std::vector<double> radial_grid(double a, int n = 129);

struct RadialMinimum {
  double r = 0.0;
  double value = 0.0;
  int grid_index = 0;
  std::vector<double> local_minima;  // grid radii of every interior local minimum
};

/// Minimum over the grid of f(r) refined by golden section between the argmin's neighbours.
/// Throws GridTooCoarse when the grid argmin sits on the grid edge.
RadialMinimum minimize_on_grid(const std::vector<double>& grid, const std::function<double(double)>& f);

struct Lambda0Result {
  double lambda0 = 0.0;
  double r0 = 0.0;
  double residual = 0.0;           // sigma1(lambda0, r0)
  double bracket_lo = 0.0;         // bisection bracket, predicate true at lo
  double bracket_hi = 0.0;
  std::vector<double> near_zero_minima;  // radii of local minima of sigma1(lambda0, .) close to 0
  int grid_points = 0;
};

/// Bisection in lambda on "min over the refined r grid of sigma1 > 0", then a secant polish of
/// sigma1(., r0) = 0 so the residual is at rounding level.
Lambda0Result find_lambda0(double a, int k, double tol, int grid_points = 129);

/// Largest lambda with min over the same ray of g(zeta_1(r)) >= 0, polished like find_lambda0.
double lambda_star_ray(double a, double tol, int grid_points = 129);

/// Printed reduced profile F(mu) = k a0 + 2 a1 mu f + k a2 lambda mu^2 - a3 mu^2 f^2.
double reduced_F(const EnergyConstants& c, int k, double lambda, double mu, double f);

/// Stationary mu of reduced_F for given f <= 0.
double mu0_from_f(const EnergyConstants& c, int k, double lambda, double f);

/// mu0 at polygon radius r, with f = k sigma1(lambda, r).
double mu0(double a, int k, double lambda, double r, const EnergyConstants& c, double tol = 1e-13);

struct ProfileRow {
  double r = 0.0;
  double f = 0.0;
  bool in_regime = false;  // f < 0
  double mu = 0.0;
  double phi = 0.0;  // F(mu0) - k a0
};

struct ReducedProfile {
  std::vector<ProfileRow> rows;
  std::vector<double> critical_r;  // interior local minima of phi among in-regime rows
};

ReducedProfile reduced_profile(double a, int k, double lambda, const std::vector<double>& r_grid,
                               const EnergyConstants& c, double tol = 1e-13);

struct ThresholdResult {
  double threshold = 0.0;  // midpoint of the final bracket
  double lo = 0.0, hi = 0.0;
  bool predicate_lo = false, predicate_hi = false;
  std::vector<std::pair<double, bool>> scan;  // coarse scan (a, predicate)
  double certificate_bound = 1.0 / 49.0;      // sufficient bound for k = 2
};

/// The empirical predicate behind a_threshold: lambda = 0 positivity of sigma1 and of
/// g^2 - G^2 for every pair on the grid, plus a coarse find_lambda0.
bool threshold_predicate(double a, int k, int grid_points = 33);

ThresholdResult a_threshold(int k, double tol);

struct Certificate {
  bool holds = false;
  double margin = 0.0;                // min of q over (a, 1)
  double argmin_t = 0.0;
  std::optional<double> touch_t;      // argmin when margin <= 0
  std::optional<std::pair<double, double>> negative_region;  // where q <= 0
};

/// q(t) = 4 t^2 - (7a + 1) t + 4a on (a, 1).
Certificate two_bubble_certificate(double a);

struct CriticalityChecks {
  bool psi_zero = false;
  bool psd = false;
  bool radial_crit = false;
  bool monotone_lambda = false;
  bool lambda0_below_lambda_star = false;
};

struct CriticalityReport {
  double a = 0.0;
  int k = 0;
  double lambda1 = 0.0;
  double lambda0 = 0.0;
  double r0 = 0.0;
  double sigma1_at_crit = 0.0;
  double psi_at_crit = 0.0;
  std::vector<double> eigenvalues_at_crit;
  numerics::FiniteDifference d_sigma1_d_lambda;
  numerics::FiniteDifference radial_slope;
  numerics::FiniteDifference radial_curvature;
  double max_d_sigma1_d_lambda_on_grid = 0.0;
  double lambda_star = 0.0;
  double lambda_gap = 0.0;         // lambda_star - lambda0
  double lambda_resolution = 0.0;  // ordering is decided up to this
  std::vector<std::pair<double, double>> mu0_curve;  // (eps, mu0(lambda0 + eps, r0))
  std::vector<double> near_zero_minima;
  CriticalityChecks checks;
  double tolerance = 0.0;
};

CriticalityReport criticality_report(double a, int k, double tol);

}  // namespace concentra
