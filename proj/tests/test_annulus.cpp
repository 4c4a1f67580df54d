#include <doctest.h>

#include <cmath>
#include <numbers>

#include "concentra/annulus.hpp"
#include "concentra/errors.hpp"
#include "concentra/interaction.hpp"

using namespace concentra;

TEST_CASE("polygon geometry") {
  const auto p = polygon_points({5, 0.7, 0.3});
  REQUIRE(p.size() == 5);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(norm(p[i]) == doctest::Approx(0.7));
    CHECK(p[i][2] == 0.0);
    CHECK(distance(p[i], p[(i + 1) % 5]) == doctest::Approx(2 * 0.7 * std::sin(std::numbers::pi / 5)));
  }
  CHECK(p[0][0] == doctest::Approx(0.7));
}

TEST_CASE("first row and sigma1") {
  const double a = 0.4, lambda = 3.0, r = 0.7;
  const int k = 5;
  const auto row = polygon_first_row(a, k, lambda, r, 1e-13);
  const auto m = build_matrix(Domain::annulus(a), lambda, polygon_points({k, r, a}), 1e-13);
  for (int j = 0; j < k; ++j) CHECK(row[j] == doctest::Approx(m.m(0, j)).epsilon(1e-12));
  double s = 0;
  for (double v : row) s += v;
  CHECK(sigma1_polygon(a, k, lambda, r, 1e-13) == doctest::Approx(s).epsilon(1e-13));
  CHECK_THROWS_AS(sigma1_polygon(a, 1, lambda, r, 1e-13), Error);
  CHECK_THROWS_AS(sigma1_polygon(a, k, lambda, 0.3, 1e-13), Error);
}

TEST_CASE("radial grid") {
  const auto g = radial_grid(0.9, 17);
  CHECK(g.front() == doctest::Approx(0.9 + 0.004));
  CHECK(g.back() == doctest::Approx(1.0 - 0.004));
}

TEST_CASE("grid minimiser") {
  const auto g = numerics::chebyshev_grid(0.0, 1.0, 21);
  const auto m = minimize_on_grid(g, [](double r) { return (r - 0.37) * (r - 0.37) - 1.0; });
  CHECK(m.r == doctest::Approx(0.37).epsilon(1e-8));
  CHECK(m.value == doctest::Approx(-1.0));
  CHECK_THROWS_AS(minimize_on_grid(g, [](double r) { return r; }), Error);
}

TEST_CASE("two-bubble certificate") {
  const auto edge = two_bubble_certificate(1.0 / 49);
  CHECK(std::abs(edge.margin) < 1e-10);
  CHECK(std::abs(edge.argmin_t - 1.0 / 7) < 1e-8);
  for (double a : {0.05, 0.5, 0.9}) {
    const auto c = two_bubble_certificate(a);
    CHECK(c.holds);
    CHECK(c.margin > 0);
    CHECK_FALSE(c.touch_t.has_value());
    const double q = 4 * c.argmin_t * c.argmin_t - (7 * a + 1) * c.argmin_t + 4 * a;
    CHECK(q == doctest::Approx(c.margin));
  }
  const auto bad = two_bubble_certificate(0.01);
  CHECK_FALSE(bad.holds);
  REQUIRE(bad.negative_region.has_value());
  CHECK(bad.negative_region->first < *bad.touch_t);
  CHECK(*bad.touch_t < bad.negative_region->second);
}

TEST_CASE("stationary mu of the reduced profile") {
  const auto c = EnergyConstants::closed_forms();
  const int k = 2;
  const double lambda = 400.0, f = -1e-3;
  const double mu = mu0_from_f(c, k, lambda, f);
  CHECK(mu > 0);
  const auto d = numerics::richardson_derivative(
      [&](double m) { return reduced_F(c, k, lambda, m, f); }, mu, 1e-3 * mu);
  CHECK(std::abs(d.value) < 1e-10 * c.a1.closed_form);
  CHECK_THROWS_AS(mu0_from_f(c, k, lambda, 1e-3), Error);
  CHECK_THROWS_AS(mu0_from_f(c, k, 0.0, -1.0), Error);
}

TEST_CASE("critical lambda on a moderately thick annulus") {
  const double a = 0.5;
  const double l1 = lambda1(Domain::annulus(a));
  const auto r = find_lambda0(a, 2, 1e-10 * l1, 65);
  CHECK(std::abs(r.residual) < 1e-12);
  CHECK(r.bracket_lo <= r.lambda0 + 1e-9 * l1);
  CHECK(r.r0 > a);
  CHECK(r.r0 < 1.0);
  CHECK(sigma1_polygon(a, 2, 0.99 * r.lambda0, r.r0, 1e-13) > 0);
  const double star = lambda_star_ray(a, 1e-10 * l1, 65);
  CHECK(star > r.lambda0 + 1e-4);
  const auto m = build_matrix(Domain::annulus(a), r.lambda0, polygon_points({2, r.r0, a}), 1e-13);
  const auto e = eigen(m);
  CHECK(std::abs(e.values[0]) < 1e-10);
  CHECK(e.values[1] > 0);
}

TEST_CASE("reduced profile regime flags") {
  const auto c = EnergyConstants::closed_forms();
  const auto grid = radial_grid(0.5, 9);
  const auto p = reduced_profile(0.5, 2, 0.0, grid, c);
  for (const auto& row : p.rows) {
    CHECK(row.f > 0);
    CHECK_FALSE(row.in_regime);
  }
  CHECK(p.critical_r.empty());
}

TEST_CASE("a thick annulus has no positive start for many points") {
  CHECK_THROWS_AS(find_lambda0(0.05, 6, 1e-3, 17), Error);
  CHECK_FALSE(threshold_predicate(0.05, 6, 17));
}
