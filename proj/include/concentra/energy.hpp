#pragma once

#include <string>
#include <vector>

#include "concentra/annulus.hpp"
#include "concentra/bubble.hpp"
#include "concentra/greens.hpp"
#include "concentra/point.hpp"

namespace concentra {

/// U0 = sum_i [w_i + mu_i^(1/2) (-4 pi alpha3 H(x, zeta_i) + mu_i D0((x - zeta_i)/mu_i))].
struct Ansatz {
  Domain domain;
  double lambda = 0.0;
  std::vector<BubbleParams> bubbles;
  double green_tol = 1e-13;
};

/// Validates: centers interior and pairwise distinct, mu_i <= 0.2 * min(pairwise distance,
/// boundary distance). Throws InvalidConfiguration.
Ansatz build_ansatz(const Domain& d, double lambda, const std::vector<BubbleParams>& bubbles,
                    double green_tol = 1e-13);

/// Equal-mu bubbles on the polygon.
Ansatz polygon_ansatz(const Domain& d, double lambda, const std::vector<Point3>& centers, double mu,
                      double green_tol = 1e-13);

struct AnsatzPoint {
  double u = 0.0;           // U0(x)
  std::vector<double> w;    // w_i(x)
  std::vector<double> pi;   // boundary corrections mu^(1/2)(-4 pi alpha3 H + mu D0)
  std::vector<double> d0;   // mu_i^(3/2) D0((x - zeta_i)/mu_i)
  int dominant = 0;         // index of the largest w_i
  double excess = 0.0;      // U0 - w_dominant, summed without cancellation
};

AnsatzPoint eval_ansatz(const Ansatz& A, const Point3& x);
double ansatz_value(const Ansatz& A, const Point3& x);

/// Laplacian(U0) + lambda U0 + U0^5 from the closed-form identity.
double ansatz_residual(const Ansatz& A, const Point3& x);

/// Same quantity with a fourth-order finite-difference Laplacian of step h.
double ansatz_residual_fd(const Ansatz& A, const Point3& x, double h = 1e-4);

/// E(y) = eps^(5/2) [U0(eps y)^5 - sum_i w_i(eps y)^5], with y in the rescaled domain.
double error_E(const Ansatz& A, double eps, const Point3& y);

/// omega(y) = sum_i (1 + |y - zeta_i/eps|)^-1.
double norm_weight(const Ansatz& A, double eps, const Point3& y);

struct NormResult {
  double value = 0.0;
  Point3 argmax{0.0, 0.0, 0.0};  // rescaled coordinates
  int samples = 0;
};

/// Supremum of omega^-(2+nu) |E| over a structured sample set: log-spaced shells around every
/// rescaled center plus a product grid over the domain.
NormResult norm_star_star(const Ansatz& A, double eps, double nu = 0.5, int sample_budget = 6000);

struct EnergyResult {
  double value = 0.0;
  double error = 0.0;  // difference between the last two resolution levels
  int level = 0;
  long evaluations = 0;
};

/// int (1/2)(sum w_i^5) U0 - U0^6 / 6 over the domain, by bubble-centred charts with a
/// w^6 partition of unity. Refines until two successive levels agree to tol.
EnergyResult energy(const Ansatz& A, double tol = 1e-9, int max_level = 3);

/// One fixed quadrature level, exposed for convergence studies.
double energy_at_level(const Ansatz& A, int level, long* evaluations = nullptr);

struct ExpansionFit {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double c1_target = 0.0, c2_target = 0.0;
  double sigma1 = 0.0;
  double order = 0.0;  // exponent of energy - k a0 - c1 mu - c2 mu^2
  double condition = 0.0;
  std::vector<double> mu;
  std::vector<double> excess;  // energy - k a0
  std::vector<double> quad_error;
  double c1_relative_error() const;
  double c2_relative_error() const;
};

/// Fits energy(mu) - k a0 = c1 mu + c2 mu^2 + c3 mu^3 for equal-mu polygon bubbles.
ExpansionFit expansion_fit(const Domain& d, const PolygonConfig& config, double lambda,
                           const std::vector<double>& mu_grid, const EnergyConstants& consts,
                           double tol = 1e-10);

}  // namespace concentra
