#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace concentra::numerics {

/// Neumaier-compensated running sum. Accumulation order is the caller's order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double compensated_total(std::span<const double> values);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed once per n and cached.
const GaussRule& gauss_legendre(int n);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration on [a, b].
/// Throws Error(QuadratureNotConverged) when the panel budget is exhausted.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     double rel_tol = 0.0, int max_panels = 4000);

struct RadialQuadResult {
  double value = 0.0;
  double error = 0.0;   // quadrature error plus tail bound
  double cutoff = 0.0;  // R
  double tail_bound = 0.0;
};

/// Integral of f over [0, inf). `tail_bound(R)` must bound |int_R^inf f|. R is doubled
/// until the tail bound is below tol/10; [0, R] is integrated on geometric panels.
RadialQuadResult integrate_to_infinity(const std::function<double(double)>& f,
                                       const std::function<double(double)>& tail_bound,
                                       double tol);

/// Bisection on a monotone predicate: `pred(lo)` true, `pred(hi)` false.
/// Returns the final bracket {lo, hi} with hi - lo <= tol.
std::pair<double, double> bisect_predicate(const std::function<bool(double)>& pred, double lo,
                                           double hi, double tol, int max_iter = 200);

struct MinimumResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum inside [lo, hi].
MinimumResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tol, int max_iter = 200);

/// Least squares for a small dense system (columns = basis functions).
/// Returns coefficients; throws FitIllConditioned if the normal matrix is singular.
std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> rhs, double* condition = nullptr);

struct PowerFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
};

/// Fit |y| = C x^p in log-log space.
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct FiniteDifference {
  double value = 0.0;
  double error = 0.0;
  double step = 0.0;
};

/// Central first difference at steps h and h/2 combined by one Richardson level.
FiniteDifference richardson_derivative(const std::function<double(double)>& f, double x, double h);

/// Same for the second derivative.
FiniteDifference richardson_second_derivative(const std::function<double(double)>& f, double x,
                                              double h);

/// Chebyshev (Gauss-Lobatto) points on [lo, hi], ascending, n >= 2.
std::vector<double> chebyshev_grid(double lo, double hi, int n);

}  // namespace concentra::numerics
