#include <doctest.h>

#include <cmath>
#include <numbers>

#include "concentra/annulus.hpp"
#include "concentra/energy.hpp"
#include "concentra/errors.hpp"

using namespace concentra;

TEST_CASE("ansatz validation") {
  const Domain b = Domain::unit_ball();
  CHECK_NOTHROW(build_ansatz(b, 1.0, {{0.01, {0.3, 0, 0}}, {0.01, {-0.3, 0, 0}}}));
  CHECK_THROWS_AS(build_ansatz(b, 1.0, {{0.2, {0.3, 0, 0}}, {0.2, {-0.3, 0, 0}}}), Error);
  CHECK_THROWS_AS(build_ansatz(b, 1.0, {{0.01, {0.3, 0, 0}}, {0.01, {0.3, 0, 0}}}), Error);
  CHECK_THROWS_AS(build_ansatz(b, 1.0, {{0.01, {1.3, 0, 0}}}), Error);
  CHECK_THROWS_AS(build_ansatz(b, 1.0, {{-0.01, {0.3, 0, 0}}}), Error);
}

TEST_CASE("ansatz components") {
  const Domain b = Domain::unit_ball();
  const auto A = polygon_ansatz(b, 2.0, polygon_points({2, 0.4, 0.0}), 0.01);
  const Point3 x{0.35, 0.05, 0.02};
  const auto p = eval_ansatz(A, x);
  double u = 0;
  for (std::size_t i = 0; i < p.w.size(); ++i) u += p.w[i] + p.pi[i];
  CHECK(p.u == doctest::Approx(u).epsilon(1e-13));
  CHECK(p.dominant == 0);
  CHECK(p.excess == doctest::Approx(p.u - p.w[0]).epsilon(1e-10));
  const double mu = 0.01;
  const double h = regular_part(b, 2.0, x, A.bubbles[0].center, 1e-13).value;
  const double d0 = d0_closed_form(distance(x, A.bubbles[0].center) / mu, 2.0);
  CHECK(p.pi[0] == doctest::Approx(std::sqrt(mu) * (-4 * std::numbers::pi * kAlpha3 * h + mu * d0))
                       .epsilon(1e-10));
  CHECK(ansatz_value(A, x) == p.u);
}

TEST_CASE("residual identity against finite differences") {
  const auto A = polygon_ansatz(Domain::annulus(0.3), 5.0, polygon_points({3, 0.65, 0.3}), 0.01);
  for (const Point3& x : {Point3{0.66, 0.02, 0.01}, Point3{0.5, 0.3, -0.2}, Point3{-0.1, 0.6, 0.1}}) {
    const double r = ansatz_residual(A, x);
    const double f = ansatz_residual_fd(A, x);
    CHECK(std::abs(r - f) <= 1e-4 * std::max(1.0, std::abs(r)));
  }
  CHECK_THROWS_AS(ansatz_residual_fd(A, {0.99995, 0, 0}, 1e-4), Error);
}

TEST_CASE("error term and weight") {
  const Domain b = Domain::unit_ball();
  const double eps = 0.05;
  const auto A = polygon_ansatz(b, 1.0, polygon_points({2, 0.25, 0.0}), eps);
  const Point3 y{2.0, 1.0, 0.5};
  const Point3 x = eps * y;
  const auto p = eval_ansatz(A, x);
  double sum5 = 0;
  for (double w : p.w) sum5 += std::pow(w, 5);
  const double naive = std::pow(eps, 2.5) * (std::pow(p.u, 5) - sum5);
  CHECK(error_E(A, eps, y) == doctest::Approx(naive).epsilon(1e-8));
  double omega = 0;
  for (const auto& bp : A.bubbles) omega += 1.0 / (1.0 + distance(y, (1.0 / eps) * bp.center));
  CHECK(norm_weight(A, eps, y) == doctest::Approx(omega).epsilon(1e-14));
}

TEST_CASE("error norm sampling") {
  const auto A = polygon_ansatz(Domain::unit_ball(), 1.0, polygon_points({2, 0.25, 0.0}), 0.02);
  const auto n = norm_star_star(A, 0.02, 0.5, 2000);
  CHECK(n.value > 0);
  CHECK(n.samples <= 2000);
  const double w = norm_weight(A, 0.02, n.argmax);
  CHECK(n.value == doctest::Approx(std::abs(error_E(A, 0.02, n.argmax)) / std::pow(w, 2.5)));
}

TEST_CASE("single bubble energy follows the two-term expansion") {
  const Domain b = Domain::unit_ball();
  const auto c = EnergyConstants::closed_forms();
  const double lambda = 1.0, mu = 0.003;
  const auto A = build_ansatz(b, lambda, {{mu, {0, 0, 0}}});
  const auto e = energy(A, 1e-10, 4);
  const double g = robin(b, lambda, {0, 0, 0}, 1e-14).value;
  const double two_term =
      c.a0.closed_form + c.a1.closed_form * g * mu +
      (c.a2.closed_form * lambda - c.a3.closed_form * g * g) * mu * mu;
  CHECK(e.error <= 1e-10);
  CHECK(std::abs(e.value - two_term) < 0.05 * std::abs(c.a2.closed_form * lambda - c.a3.closed_form * g * g) * mu * mu);
}

TEST_CASE("energy levels converge") {
  const auto A = polygon_ansatz(Domain::unit_ball(), 1.0, polygon_points({2, 0.3, 0.0}), 0.005);
  const double e1 = energy_at_level(A, 1), e2 = energy_at_level(A, 2), e3 = energy_at_level(A, 3);
  CHECK(std::abs(e3 - e2) < std::abs(e2 - e1) + 1e-14);
  CHECK_THROWS_AS(energy(A, 1e-30, 1), Error);
}

TEST_CASE("expansion fit input checks") {
  const auto c = EnergyConstants::closed_forms();
  const Domain b = Domain::unit_ball();
  CHECK_THROWS_AS(expansion_fit(b, {2, 0.3, 0.0}, 1.0, {1e-2, 5e-3, 2e-3}, c), Error);
  CHECK_THROWS_AS(expansion_fit(b, {2, 0.3, 0.0}, 1.0, {1e-3, 2e-3, 5e-3, 1e-2}, c), Error);
}
