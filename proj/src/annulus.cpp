#include "concentra/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "concentra/errors.hpp"
#include "concentra/interaction.hpp"
#include "concentra/parallel.hpp"

namespace concentra {

namespace {
constexpr double kGreenTol = 1e-13;

// Tangency root of h(lambda, r) = 0 at the radial minimum: secant in lambda at fixed r alternated
// with golden section in r. The root is stationary in r, so a few alternations converge.
std::pair<double, double> polish_tangency(const std::function<double(double, double)>& h,
                                          const std::vector<double>& grid, double lambda,
                                          double r0, double l1, double tol) {
  for (int outer = 0; outer < 4; ++outer) {
    double x0 = lambda, x1 = std::min(lambda + std::max(tol, 1e-9 * l1), 0.5 * (lambda + l1));
    double f0 = h(x0, r0);
    double f1 = h(x1, r0);
    for (int it = 0; it < 50 && f1 != f0 && std::abs(f1) > 1e-15; ++it) {
      const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
      x0 = x1;
      f0 = f1;
      x1 = x2;
      f1 = h(x1, r0);
    }
    lambda = x1;
    auto it = std::upper_bound(grid.begin(), grid.end(), r0);
    const std::size_t idx = std::clamp<std::size_t>(it - grid.begin(), 1, grid.size() - 1);
    const double left = grid[std::max<std::size_t>(idx, 2) - 2];
    const double right = grid[std::min(idx + 1, grid.size() - 1)];
    r0 = numerics::golden_section_minimize([&](double r) { return h(lambda, r); }, left, right, 1e-10).x;
  }
  return {lambda, r0};
}
}

std::vector<Point3> polygon_points(const PolygonConfig& c) {
  std::vector<Point3> pts;
  for (int j = 0; j < c.k; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / c.k;
    pts.push_back({c.r * std::cos(angle), c.r * std::sin(angle), 0.0});
  }
  return pts;
}

std::vector<double> polygon_first_row(double a, int k, double lambda, double r, double tol) {
  const Domain d = Domain::annulus(a);
  const auto pts = polygon_points({k, r, a});
  std::vector<double> row(k);
  row[0] = robin(d, lambda, pts[0], tol).value;
  for (int j = 1; j < k; ++j) {
    // G(zeta_1, zeta_j) = G(zeta_1, zeta_{k+2-j}); evaluate once and mirror for exact symmetry.
    if (j > k - j) {
      row[j] = row[k - j];
      continue;
    }
    row[j] = -green(d, lambda, pts[0], pts[j], tol).value;
  }
  return row;
}

double sigma1_polygon(double a, int k, double lambda, double r, double tol) {
  if (k < 2) throw Error(ErrorKind::InvalidConfiguration, "polygon needs k >= 2");
  if (!(r > a && r < 1.0)) throw Error(ErrorKind::DomainError, "polygon radius must lie in (a, 1)");
  const auto row = polygon_first_row(a, k, lambda, r, tol);
  return numerics::compensated_total(row);
}

std::vector<double> radial_grid(double a, int n) {
  const double m = 0.04 * (1.0 - a);
  return numerics::chebyshev_grid(a + m, 1.0 - m, n);
}

RadialMinimum minimize_on_grid(const std::vector<double>& grid,
                               const std::function<double(double)>& f) {
  const std::size_t n = grid.size();
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) { values[i] = f(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (values[i] < values[best]) best = i;
  if (best == 0 || best + 1 == n)
    throw Error(ErrorKind::GridTooCoarse, "grid minimum sits on the edge of the radial grid");
  RadialMinimum out;
  out.grid_index = static_cast<int>(best);
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (values[i] < values[i - 1] && values[i] <= values[i + 1]) out.local_minima.push_back(grid[i]);
  const auto refined = numerics::golden_section_minimize(f, grid[best - 1], grid[best + 1], 1e-10);
  if (refined.value < values[best]) {
    out.r = refined.x;
    out.value = refined.value;
  } else {
    out.r = grid[best];
    out.value = values[best];
  }
  return out;
}

Lambda0Result find_lambda0(double a, int k, double tol, int grid_points) {
  const Domain d = Domain::annulus(a);
  const double l1 = lambda1(d);
  const auto grid = radial_grid(a, grid_points);
  const auto sigma_at = [&](double lambda) {
    return [=](double r) { return sigma1_polygon(a, k, lambda, r, kGreenTol); };
  };

  const RadialMinimum start = minimize_on_grid(grid, sigma_at(0.0));
  if (!(start.value > 0.0))
    throw Error(ErrorKind::NoPositiveStart,
                "min_r sigma1(0, r) <= 0: annulus too thick for this k (a below empirical a_k)");

  const auto [lo, hi] = numerics::bisect_predicate(
      [&](double lambda) { return minimize_on_grid(grid, sigma_at(lambda)).value > 0.0; }, tol,
      l1 - tol, tol);

  Lambda0Result out;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.grid_points = grid_points;
  const auto [lambda, r0] = polish_tangency(
      [&](double lam, double r) { return sigma1_polygon(a, k, lam, r, kGreenTol); }, grid, lo,
      minimize_on_grid(grid, sigma_at(lo)).r, l1, tol);
  if (std::abs(lambda - lo) > std::max(10.0 * tol, 1e-8 * l1))
    throw Error(ErrorKind::GridTooCoarse, "refined root disagrees with the bisection bracket");
  out.lambda0 = lambda;
  out.r0 = r0;
  out.residual = sigma1_polygon(a, k, lambda, r0, kGreenTol);

  const auto f = sigma_at(lambda);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = f(grid[i]); });
  const double vmax = *std::max_element(values.begin(), values.end());
  const double vmin = *std::min_element(values.begin(), values.end());
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (values[i] < values[i - 1] && values[i] <= values[i + 1] &&
        values[i] - vmin <= 1e-3 * (vmax - vmin))
      out.near_zero_minima.push_back(grid[i]);
  return out;
}

double lambda_star_ray(double a, double tol, int grid_points) {
  const Domain d = Domain::annulus(a);
  const double l1 = lambda1(d);
  const auto grid = radial_grid(a, grid_points);
  const auto g_at = [&](double lambda) {
    return [=, &d](double r) { return robin(d, lambda, {r, 0.0, 0.0}, kGreenTol).value; };
  };
  const auto [lo, hi] = numerics::bisect_predicate(
      [&](double lambda) { return minimize_on_grid(grid, g_at(lambda)).value > 0.0; }, tol,
      l1 - tol, tol);
  const auto [lambda, r] = polish_tangency(
      [&](double lam, double r) { return robin(d, lam, {r, 0.0, 0.0}, kGreenTol).value; }, grid, lo,
      minimize_on_grid(grid, g_at(lo)).r, l1, tol);
  (void)r;
  if (std::abs(lambda - lo) > std::max(10.0 * tol, 1e-8 * l1)) return 0.5 * (lo + hi);
  return lambda;
}

double reduced_F(const EnergyConstants& c, int k, double lambda, double mu, double f) {
  return k * c.a0.closed_form + 2.0 * c.a1.closed_form * mu * f +
         k * c.a2.closed_form * lambda * mu * mu - c.a3.closed_form * mu * mu * f * f;
}

double mu0_from_f(const EnergyConstants& c, int k, double lambda, double f) {
  if (f > 0.0) throw Error(ErrorKind::WrongRegime, "f > 0: configuration is pre-critical");
  const double den = k * c.a2.closed_form * lambda - c.a3.closed_form * f * f;
  if (!(den > 1e-14 * k * c.a2.closed_form * std::max(lambda, 1.0)))
    throw Error(ErrorKind::DegenerateDenominator, "k a2 lambda - a3 f^2 is not positive");
  return -c.a1.closed_form * f / den;
}

double mu0(double a, int k, double lambda, double r, const EnergyConstants& c, double tol) {
  const double f = k * sigma1_polygon(a, k, lambda, r, tol);
  return mu0_from_f(c, k, lambda, f);
}

ReducedProfile reduced_profile(double a, int k, double lambda, const std::vector<double>& r_grid,
                               const EnergyConstants& c, double tol) {
  ReducedProfile out;
  out.rows.resize(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t i) {
    ProfileRow& row = out.rows[i];
    row.r = r_grid[i];
    row.f = k * sigma1_polygon(a, k, lambda, row.r, tol);
    row.in_regime = row.f < 0.0;
    if (row.in_regime) {
      row.mu = mu0_from_f(c, k, lambda, row.f);
      row.phi = reduced_F(c, k, lambda, row.mu, row.f) - k * c.a0.closed_form;
    }
  });
  for (std::size_t i = 1; i + 1 < out.rows.size(); ++i) {
    const auto& p = out.rows[i - 1];
    const auto& q = out.rows[i];
    const auto& s = out.rows[i + 1];
    if (p.in_regime && q.in_regime && s.in_regime && q.phi < p.phi && q.phi <= s.phi)
      out.critical_r.push_back(q.r);
  }
  return out;
}

bool threshold_predicate(double a, int k, int grid_points) {
  try {
    const Domain d = Domain::annulus(a);
    const auto grid = radial_grid(a, grid_points);
    std::vector<char> ok(grid.size(), 0);
    parallel_for(grid.size(), [&](std::size_t i) {
      const auto row = polygon_first_row(a, k, 0.0, grid[i], kGreenTol);
      bool good = numerics::compensated_total(row) > 0.0;
      for (int j = 1; j < k; ++j) good = good && row[0] * row[0] - row[j] * row[j] > 0.0;
      ok[i] = good;
    });
    if (std::find(ok.begin(), ok.end(), 0) != ok.end()) return false;
    find_lambda0(a, k, 1e-6 * lambda1(d), grid_points);
    return true;
  } catch (const Error&) {
    return false;
  }
}

ThresholdResult a_threshold(int k, double tol) {
  ThresholdResult out;
  const std::vector<double> scan = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  for (double a : scan) out.scan.emplace_back(a, threshold_predicate(a, k));
  // Smallest scanned a from which the predicate holds for every larger scanned a.
  int first_true = static_cast<int>(scan.size());
  for (int i = static_cast<int>(scan.size()) - 1; i >= 0 && out.scan[i].second; --i) first_true = i;
  if (first_true == static_cast<int>(scan.size())) {
    out.lo = scan.back();
    out.hi = 1.0;
    out.predicate_lo = false;
    out.predicate_hi = false;
    out.threshold = 1.0;
    return out;
  }
  if (first_true == 0) {
    out.lo = 0.0;
    out.hi = scan.front();
    out.predicate_lo = false;  // not evaluated at a = 0
    out.predicate_hi = true;
    out.threshold = scan.front();
    return out;
  }
  const auto [lo, hi] = numerics::bisect_predicate(
      [&](double a) { return !threshold_predicate(a, k); }, scan[first_true - 1], scan[first_true],
      tol);
  out.lo = lo;
  out.hi = hi;
  out.predicate_lo = false;
  out.predicate_hi = true;
  out.threshold = 0.5 * (lo + hi);
  return out;
}

Certificate two_bubble_certificate(double a) {
  Certificate c;
  // The vertex (7a + 1)/8 always lies in (a, 1) for 0 < a < 1.
  const double b = 7.0 * a + 1.0;
  c.argmin_t = b / 8.0;
  c.margin = -(49.0 * a - 1.0) * (a - 1.0) / 16.0;
  c.holds = c.margin > 0.0;
  if (!c.holds) {
    c.touch_t = c.argmin_t;
    const double disc = std::max(0.0, b * b - 64.0 * a);
    const double root = std::sqrt(disc);
    c.negative_region = std::make_pair(std::max(a, (b - root) / 8.0), std::min(1.0, (b + root) / 8.0));
  }
  return c;
}

CriticalityReport criticality_report(double a, int k, double tol) {
  CriticalityReport rep;
  const Domain d = Domain::annulus(a);
  rep.a = a;
  rep.k = k;
  rep.lambda1 = lambda1(d);
  rep.tolerance = 10.0 * tol;

  const Lambda0Result l0 = find_lambda0(a, k, tol);
  rep.lambda0 = l0.lambda0;
  rep.r0 = l0.r0;
  rep.sigma1_at_crit = l0.residual;
  rep.near_zero_minima = l0.near_zero_minima;

  const auto m = build_matrix(d, rep.lambda0, polygon_points({k, rep.r0, a}), kGreenTol);
  rep.psi_at_crit = psi(m);
  rep.eigenvalues_at_crit = eigen(m).values;
  double others = 1.0;
  for (std::size_t i = 1; i < rep.eigenvalues_at_crit.size(); ++i) others *= std::abs(rep.eigenvalues_at_crit[i]);
  rep.checks.psi_zero = std::abs(rep.psi_at_crit) <= rep.tolerance * others &&
                        std::abs(rep.sigma1_at_crit) <= rep.tolerance;
  rep.checks.psd = rep.eigenvalues_at_crit.front() >= -rep.tolerance;

  const double hl = 1e-4 * rep.lambda1;
  rep.d_sigma1_d_lambda = numerics::richardson_derivative(
      [&](double lam) { return sigma1_polygon(a, k, lam, rep.r0, kGreenTol); }, rep.lambda0, hl);
  const double hr = 1e-3 * (1.0 - a);
  const auto radial = [&](double r) { return sigma1_polygon(a, k, rep.lambda0, r, kGreenTol); };
  rep.radial_slope = numerics::richardson_derivative(radial, rep.r0, hr);
  rep.radial_curvature = numerics::richardson_second_derivative(radial, rep.r0, hr);
  rep.checks.radial_crit =
      std::abs(rep.radial_slope.value) <=
      10.0 * rep.radial_slope.error + 1e-6 * std::abs(rep.radial_curvature.value) * (1.0 - a);

  const auto grid = radial_grid(a);
  std::vector<double> slopes(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    slopes[i] = numerics::richardson_derivative(
                    [&](double lam) { return sigma1_polygon(a, k, lam, grid[i], kGreenTol); },
                    rep.lambda0, hl)
                    .value;
  });
  rep.max_d_sigma1_d_lambda_on_grid = *std::max_element(slopes.begin(), slopes.end());
  rep.checks.monotone_lambda = rep.max_d_sigma1_d_lambda_on_grid < 0.0 && rep.d_sigma1_d_lambda.value < 0.0;

  rep.lambda_star = lambda_star_ray(a, tol);
  rep.lambda_gap = rep.lambda_star - rep.lambda0;
  rep.lambda_resolution = std::max(rep.tolerance, 1e-10 * rep.lambda1);
  rep.checks.lambda0_below_lambda_star = rep.lambda_gap > -rep.lambda_resolution;

  const EnergyConstants c = EnergyConstants::closed_forms();
  for (double eps : {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1}) {
    if (rep.lambda0 + eps >= rep.lambda1) break;
    rep.mu0_curve.emplace_back(eps, mu0(a, k, rep.lambda0 + eps, rep.r0, c));
  }
  return rep;
}

}  // namespace concentra
