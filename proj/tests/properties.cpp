#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "concentra/annulus.hpp"
#include "concentra/energy.hpp"
#include "concentra/interaction.hpp"

using namespace concentra;

namespace {

Point3 random_point(std::mt19937_64& rng, const Domain& d, double margin) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Point3 p{u(rng), u(rng), u(rng)};
    if (d.contains(p) && d.boundary_distance(p) > margin) return p;
  }
}

Point3 rotate(const Point3& p, const Point3& axis, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Point3 k = (1.0 / norm(axis)) * axis;
  return c * p + s * cross(k, p) + ((1.0 - c) * dot(k, p)) * k;
}

std::vector<Domain> domains() { return {Domain::unit_ball(), Domain::annulus(0.3), Domain::annulus(0.6)}; }

double fd_laplacian(const std::function<double(const Point3&)>& f, const Point3& x, double h) {
  double s = -6.0 * f(x);
  for (int c = 0; c < 3; ++c) {
    Point3 a = x, b = x;
    a[c] += h;
    b[c] -= h;
    s += f(a) + f(b);
  }
  return s / (h * h);
}

}  // namespace

TEST_CASE("green symmetry") {
  std::mt19937_64 rng(20240601);
  for (const Domain& d : domains()) {
    std::uniform_real_distribution<double> lam(0.0, 0.95 * lambda1(d));
    for (int trial = 0; trial < 40; ++trial) {
      const Point3 x = random_point(rng, d, 0.02), y = random_point(rng, d, 0.02);
      if (distance(x, y) < 1e-3) continue;
      const double l = lam(rng);
      const double gxy = green(d, l, x, y, 1e-13).value;
      const double gyx = green(d, l, y, x, 1e-13).value;
      CHECK(std::abs(gxy - gyx) <= 1e-10 * std::max(1.0, std::abs(gxy)));
    }
  }
}

TEST_CASE("green rotation invariance") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  for (const Domain& d : domains()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Point3 x = random_point(rng, d, 0.05), y = random_point(rng, d, 0.05);
      const Point3 axis = random_point(rng, Domain::unit_ball(), 0.0);
      if (norm(axis) < 0.1 || distance(x, y) < 1e-3) continue;
      const double t = ang(rng), l = 0.5 * lambda1(d);
      const double g0 = green(d, l, x, y, 1e-13).value;
      const double g1 = green(d, l, rotate(x, axis, t), rotate(y, axis, t), 1e-13).value;
      CHECK(std::abs(g0 - g1) <= 1e-10 * std::max(1.0, std::abs(g0)));
    }
  }
}

TEST_CASE("green solves the Helmholtz equation away from the pole") {
  std::mt19937_64 rng(5);
  for (const Domain& d : domains()) {
    for (int trial = 0; trial < 6; ++trial) {
      const Point3 x = random_point(rng, d, 0.15), y = random_point(rng, d, 0.15);
      if (distance(x, y) < 0.2) continue;
      const double l = 0.4 * lambda1(d);
      const auto G = [&](const Point3& z) { return green(d, l, z, y, 1e-14).value; };
      const double lap = fd_laplacian(G, x, 1e-3);
      CHECK(std::abs(lap + l * G(x)) <= 1e-4 * std::max(1.0, std::abs(lap)));
    }
  }
}

TEST_CASE("bubble PDE identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), logmu(-3.0, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const BubbleParams p{std::pow(10.0, logmu(rng)), {u(rng), u(rng), u(rng)}};
    const Point3 far{u(rng), u(rng), u(rng)};
    const double w_far = eval_bubble(p, far);
    CHECK(std::abs(bubble_laplacian(p, far) + std::pow(w_far, 5)) <= 1e-12 * std::pow(w_far, 5));
    // Within ten core radii the finite-difference Laplacian resolves w^5 above rounding.
    const Point3 x = p.center + (10.0 * p.mu) * Point3{u(rng), u(rng), u(rng)};
    const double w = eval_bubble(p, x);
    const double h = 1e-4 * std::max(p.mu, distance(x, p.center));
    const double fd = fd_laplacian([&](const Point3& z) { return eval_bubble(p, z); }, x, h);
    CHECK(std::abs(fd + std::pow(w, 5)) <= 1e-4 * std::pow(w, 5));
  }
}

TEST_CASE("kernels against finite differences with second-order convergence") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5), m(0.05, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const BubbleParams p{m(rng), {u(rng), u(rng), u(rng)}};
    const Point3 x{u(rng), u(rng), u(rng)};
    const auto k = eval_bubble_kernels(p, x);
    const double analytic[4] = {k.z1, k.z2, k.z3, k.z4};
    for (int c = 0; c < 4; ++c) {
      const auto f = [&](double s) {
        BubbleParams q = p;
        if (c < 3)
          q.center[c] += s;
        else
          q.mu += s;
        return eval_bubble(q, x);
      };
      const double h = 1e-3 * p.mu;
      const double e1 = std::abs((f(h) - f(-h)) / (2 * h) - analytic[c]);
      const double e2 = std::abs((f(h / 2) - f(-h / 2)) / h - analytic[c]);
      const double scale = std::max(1.0, std::abs(analytic[c]));
      CHECK(e2 <= 1e-5 * scale);
      if (e1 > 1e-9 * scale) {
        const double order = std::log2(e1 / e2);
        CHECK(order > 1.8);
        CHECK(order < 2.2);
      }
    }
  }
}

TEST_CASE("interaction matrix permutation covariance") {
  std::mt19937_64 rng(99);
  const Domain d = Domain::annulus(0.3);
  std::vector<Point3> z;
  for (int i = 0; i < 4; ++i) z.push_back(random_point(rng, d, 0.1));
  auto perm = z;
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto a = build_matrix(d, 2.0, z, 1e-13), b = build_matrix(d, 2.0, perm, 1e-13);
  CHECK(psi(a) == doctest::Approx(psi(b)).epsilon(1e-11));
  const auto ea = eigen(a).values, eb = eigen(b).values;
  for (std::size_t i = 0; i < ea.size(); ++i) CHECK(std::abs(ea[i] - eb[i]) <= 1e-11 * a.m.max_abs());
}

TEST_CASE("energy permutation invariance") {
  const Domain d = Domain::unit_ball();
  const std::vector<BubbleParams> b{{0.004, {0.3, 0.1, 0.0}}, {0.003, {-0.25, 0.2, 0.1}},
                                    {0.005, {0.0, -0.3, -0.2}}};
  auto p = b;
  std::rotate(p.begin(), p.begin() + 1, p.end());
  const auto e0 = energy(build_ansatz(d, 2.0, b), 1e-10, 4);
  const auto e1 = energy(build_ansatz(d, 2.0, p), 1e-10, 4);
  CHECK(std::abs(e0.value - e1.value) <= 1e-12 * std::abs(e0.value));
}

TEST_CASE("energy rotation invariance") {
  const Domain d = Domain::annulus(0.4);
  const auto pts = polygon_points({3, 0.7, 0.4});
  std::vector<Point3> rot;
  const Point3 axis{0.3, -0.5, 0.8};
  for (const auto& p : pts) rot.push_back(rotate(p, axis, 1.1));
  const auto e0 = energy(polygon_ansatz(d, 3.0, pts, 0.004), 1e-10, 4);
  const auto e1 = energy(polygon_ansatz(d, 3.0, rot, 0.004), 1e-10, 4);
  CHECK(std::abs(e0.value - e1.value) <= 10 * (e0.error + e1.error) + 1e-10);
}

TEST_CASE("reduced energy is symmetric under relabelling") {
  const Domain d = Domain::unit_ball();
  const std::vector<Point3> z{{0.3, 0, 0}, {-0.2, 0.3, 0}, {0, -0.2, 0.3}};
  const auto c = EnergyConstants::closed_forms();
  const auto m = build_matrix(d, 1.0, z, 1e-13);
  const auto mp = build_matrix(d, 1.0, {z[2], z[0], z[1]}, 1e-13);
  const double f0 = reduced_energy_F(m.m, {0.5, 0.8, 1.1}, 1.0, c).value;
  const double f1 = reduced_energy_F(mp.m, {1.1, 0.5, 0.8}, 1.0, c).value;
  CHECK(f0 == doctest::Approx(f1).epsilon(1e-13));
}
