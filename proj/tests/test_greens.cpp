#include <doctest.h>

#include <cmath>
#include <numbers>

#include "concentra/errors.hpp"
#include "concentra/greens.hpp"

using namespace concentra;

namespace {

constexpr double kPi = std::numbers::pi;

double ball_center_robin(double lambda) {
  const double k = std::sqrt(lambda);
  return k / std::tan(k) / (4.0 * kPi);
}

// Radial Helmholtz solution singular at 0 and vanishing on |y| = 1.
double ball_center_green(double lambda, double r) {
  const double k = std::sqrt(lambda);
  return std::sin(k * (1.0 - r)) / (4.0 * kPi * r * std::sin(k));
}

double ball_laplace_green(const Point3& x, const Point3& y) {
  const double t = norm(y);
  const Point3 image = (1.0 / (t * t)) * y;
  return 1.0 / (4.0 * kPi * distance(x, y)) - 1.0 / (4.0 * kPi * t * distance(x, image));
}

}  // namespace

TEST_CASE("domain construction") {
  CHECK_THROWS_AS(Domain::annulus(0.0), Error);
  CHECK_THROWS_AS(Domain::annulus(1.0), Error);
  const Domain d = Domain::annulus(0.9);
  CHECK(lambda1(d) == doctest::Approx(kPi * kPi / 0.01).epsilon(1e-14));
  CHECK(d.contains({0.95, 0, 0}));
  CHECK_FALSE(d.contains({0.5, 0, 0}));
  CHECK(Domain::unit_ball().contains({0, 0, 0}));
  CHECK(d.boundary_distance({0.93, 0, 0}) == doctest::Approx(0.03));
}

TEST_CASE("ball robin at the centre") {
  const Domain b = Domain::unit_ball();
  for (double lambda : {1e-8, 0.5, 1.0, 2.0, kPi * kPi / 4, 5.0, 9.0}) {
    const auto g = robin(b, lambda, {0, 0, 0}, 1e-14);
    CHECK(std::abs(g.value - ball_center_robin(lambda)) < 1e-12);
  }
  CHECK(std::abs(robin(b, 1e-8, {0, 0, 0}, 1e-14).value - 1.0 / (4 * kPi)) < 1e-9);
}

TEST_CASE("ball green from the centre") {
  const Domain b = Domain::unit_ball();
  for (double lambda : {0.3, 4.0, 9.5})
    for (double r : {0.05, 0.4, 0.9}) {
      const double g = green(b, lambda, {0, 0, 0}, {0, r, 0}, 1e-14).value;
      CHECK(std::abs(g - ball_center_green(lambda, r)) < 1e-11);
    }
}

TEST_CASE("ball laplace green matches the image formula") {
  const Domain b = Domain::unit_ball();
  const Point3 xs[] = {{0.1, 0.2, -0.3}, {0.7, 0.0, 0.1}, {-0.2, -0.5, 0.6}};
  const Point3 ys[] = {{0.3, -0.1, 0.2}, {-0.6, 0.4, 0.0}, {0.05, 0.05, 0.9}};
  for (const auto& x : xs)
    for (const auto& y : ys) {
      const double g = green(b, 0.0, x, y, 1e-14).value;
      CHECK(std::abs(g - ball_laplace_green(x, y)) < 1e-11);
    }
  for (double r : {0.2, 0.5, 0.8}) {
    const double g = robin(b, 0.0, {0, 0, r}, 1e-14).value;
    CHECK(g == doctest::Approx(1.0 / (4 * kPi * (1 - r * r))).epsilon(1e-11));
  }
}

TEST_CASE("green is symmetric and regular part is finite on the diagonal") {
  const Domain d = Domain::annulus(0.4);
  const Point3 x{0.5, 0.2, 0.1}, y{-0.3, 0.6, -0.2};
  const double gxy = green(d, 3.0, x, y, 1e-14).value;
  const double gyx = green(d, 3.0, y, x, 1e-14).value;
  CHECK(std::abs(gxy - gyx) < 1e-13);
  const Point3 z{0.7, 0.0, 0.0}, z2{0.7 + 1e-6, 0.0, 0.0};
  CHECK(std::abs(regular_part(d, 3.0, z, z2, 1e-14).value - robin(d, 3.0, z, 1e-14).value) < 1e-5);
}

TEST_CASE("green errors") {
  const Domain b = Domain::unit_ball();
  CHECK_THROWS_AS(green(b, 0.5, {0.1, 0, 0}, {0.1, 0, 0}, 1e-13), Error);
  CHECK_THROWS_AS(robin(b, kPi * kPi, {0.1, 0, 0}, 1e-13), Error);
  CHECK_THROWS_AS(robin(b, -1.0, {0.1, 0, 0}, 1e-13), Error);
  CHECK_THROWS_AS(robin(b, 1.0, {1.2, 0, 0}, 1e-13), Error);
  try {
    robin(b, 1.0, {1.0 - 1e-7, 0, 0}, 1e-13);
    FAIL("expected PointsTooCloseToBoundary");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PointsTooCloseToBoundary);
  }
}

TEST_CASE("truncation order grows towards the boundary") {
  const Domain b = Domain::unit_ball();
  const auto inner = robin(b, 1.0, {0.3, 0, 0}, 1e-13);
  const auto outer = robin(b, 1.0, {0.95, 0, 0}, 1e-13);
  CHECK(outer.order > inner.order);
  CHECK(outer.tail_bound < 1e-13);
}

TEST_CASE("annulus lambda = 0 series against the mode engine") {
  for (double a : {0.3, 0.5, 0.8}) {
    const Domain d = Domain::annulus(a);
    CHECK(calibrate_omega2(a, SeriesWeighting::Multiplicity) == doctest::Approx(4 * kPi).epsilon(1e-10));
    for (double f : {0.1, 0.35, 0.6, 0.9}) {
      const double t = a + f * (1 - a);
      const Point3 x{0.0, t, 0.0};
      const auto s = annulus_g0_series(a, x, 1e-15);
      const double g = robin(d, 0.0, x, 1e-15).value;
      CHECK(std::abs(s.value - g) <= 1e-9 * std::abs(g));
      const auto anti = annulus_G0_antipodal(a, x, 1e-15);
      const double G = green(d, 0.0, x, {0.0, -t, 0.0}, 1e-15).value;
      CHECK(std::abs(anti.value - G) <= 1e-9 * std::max(1.0, std::abs(G)));
    }
  }
}

TEST_CASE("printed series weighting needs an a-dependent normalization") {
  const double w3 = calibrate_omega2(0.3, SeriesWeighting::AsPrinted);
  const double w8 = calibrate_omega2(0.8, SeriesWeighting::AsPrinted);
  CHECK(std::abs(w3 - w8) > 1.0);
}

TEST_CASE("lambda derivative of the robin function") {
  const Domain b = Domain::unit_ball();
  for (double lambda : {0.5, 2.0, 6.0}) {
    const double k = std::sqrt(lambda);
    const double exact =
        (1.0 / std::tan(k) / (2 * k) - 1.0 / (2 * std::sin(k) * std::sin(k))) / (4 * kPi);
    const auto d = d_lambda_robin(b, lambda, {0, 0, 0});
    CHECK(std::abs(d.value - exact) < 1e-8);
    CHECK(d.error < 1e-6);
  }
  CHECK_THROWS_AS(d_lambda_robin(b, 1e-6, {0, 0, 0}), Error);
}
