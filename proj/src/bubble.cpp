#include "concentra/bubble.hpp"

#include <cmath>
#include <numbers>

#include "concentra/errors.hpp"
#include "concentra/numerics.hpp"

namespace concentra {

namespace {
constexpr double kPi = std::numbers::pi;
}

double eval_bubble(const BubbleParams& p, const Point3& x) {
  const Point3 z = x - p.center;
  return kAlpha3 * std::sqrt(p.mu) / std::sqrt(p.mu * p.mu + dot(z, z));
}

BubbleKernels eval_bubble_kernels(const BubbleParams& p, const Point3& x) {
  const Point3 z = x - p.center;
  const double rho2 = dot(z, z);
  const double q = p.mu * p.mu + rho2;
  const double q32 = q * std::sqrt(q);
  const double c = kAlpha3 * std::sqrt(p.mu) / q32;
  return {c * z[0], c * z[1], c * z[2], kAlpha3 * (rho2 - p.mu * p.mu) / (2.0 * std::sqrt(p.mu) * q32)};
}

double bubble_laplacian(const BubbleParams& p, const Point3& x) {
  const Point3 z = x - p.center;
  const double q = p.mu * p.mu + dot(z, z);
  return -3.0 * kAlpha3 * std::sqrt(p.mu) * p.mu * p.mu / (q * q * std::sqrt(q));
}

double ConstantPair::relative_error() const {
  return std::abs(quadrature - closed_form) / std::abs(closed_form);
}

EnergyConstants EnergyConstants::closed_forms() {
  const double ap = kAlpha3 * kPi;
  const double ap2 = kAlpha3 * kPi * kPi;
  EnergyConstants c;
  c.a0.closed_form = ap * ap / 4.0;
  c.a1.closed_form = 8.0 * ap * ap;
  c.a2.closed_form = ap * ap;
  c.a3.closed_form = 120.0 * ap2 * ap2;
  return c;
}

double bubble_power_integral(double mu, int power, double tol) {
  if (power <= 3) throw Error(ErrorKind::DomainError, "integral of w^p diverges for p <= 3");
  const double amp = std::pow(kAlpha3 * std::sqrt(mu), power);
  const auto f = [&](double r) {
    return 4.0 * kPi * r * r * amp * std::pow(mu * mu + r * r, -0.5 * power);
  };
  const auto tail = [&](double R) { return 4.0 * kPi * amp * std::pow(R, 3.0 - power) / (power - 3.0); };
  return numerics::integrate_to_infinity(f, tail, tol).value;
}

EnergyConstants compute_constants(double tol) {
  EnergyConstants c = EnergyConstants::closed_forms();
  const double a = kAlpha3;
  const auto radial = [&](int power, double scale) {
    const double rel_tol = tol * scale;
    const auto f = [&](double r) { return 4.0 * kPi * r * r * std::pow(a, power) * std::pow(1.0 + r * r, -0.5 * power); };
    const auto tail = [&](double R) { return 4.0 * kPi * std::pow(a, power) * std::pow(R, 3.0 - power) / (power - 3.0); };
    return numerics::integrate_to_infinity(f, tail, rel_tol);
  };

  const auto u6 = radial(6, 1.0);
  c.a0.quadrature = u6.value / 3.0;
  c.a0.error_estimate = u6.error / 3.0;

  const auto u5 = radial(5, 1.0);
  c.a1.quadrature = 2.0 * kPi * a * u5.value;
  c.a1.error_estimate = 2.0 * kPi * a * u5.error;

  const auto u4 = radial(4, 1.0);
  const double pref3 = 2.5 * (4.0 * kPi * a) * (4.0 * kPi * a);
  c.a3.quadrature = pref3 * u4.value;
  c.a3.error_estimate = pref3 * u4.error;

  // (1/|z| - (1+|z|^2)^(-1/2)) U + |z| U^5 / 2, written without cancellation at large r.
  const auto f2 = [&](double r) {
    const double s = std::sqrt(1.0 + r * r);
    const double first = a * r / ((1.0 + r * r) * (s + r));
    const double second = 0.5 * r * r * r * std::pow(a / s, 5);
    return 4.0 * kPi * (first + second);
  };
  const auto tail2 = [&](double R) { return 4.0 * kPi * a / R + 2.0 * kPi * std::pow(a, 5) / R; };
  const auto i2 = numerics::integrate_to_infinity(f2, tail2, tol);
  c.a2.quadrature = 0.5 * a * i2.value;
  c.a2.error_estimate = 0.5 * a * i2.error;
  return c;
}

BetaCheck beta_integral_check(double q, double alpha) {
  if (!(q - alpha > 0.0) || !(q + alpha > 0.0))
    throw Error(ErrorKind::DomainError, "requires q - alpha > 0 and q + alpha > 0");
  const double closed =
      std::tgamma(0.5 * (q - alpha)) * std::tgamma(0.5 * (q + alpha)) / (2.0 * std::tgamma(q));
  // Fold [1, inf) onto [0, 1] with r -> 1/r, then r = v^n so the endpoint behaves like v^(>=0).
  const double beta = std::min(q - alpha, q + alpha);
  const int n = std::max(1, static_cast<int>(std::ceil(1.0 / beta)));
  const auto f = [&](double v) {
    const double r = std::pow(v, n);
    const double base = std::pow(1.0 / (1.0 + r * r), q);
    const double lo = std::pow(v, n * (q - alpha) - 1.0);
    const double hi = std::pow(v, n * (q + alpha) - 1.0);
    return n * base * (lo + hi);
  };
  const auto r = numerics::integrate(f, 0.0, 1.0, 1e-13 * closed, 1e-13);
  return {r.value, closed};
}

namespace {

// int_0^s t^2 f(t) dt
double inner_integral(double s, double lambda) {
  const double c = lambda * kAlpha3;
  if (s < 1e-3) {
    const double s2 = s * s;
    return c * s2 * (0.5 - s / 3.0 + s2 * s / 10.0 - 3.0 * s2 * s2 * s / 56.0);
  }
  return 0.5 * c * (std::asinh(s) - s / (s + std::sqrt(1.0 + s * s)));
}

}  // namespace

double compute_D0(double rho, double lambda) {
  if (!(rho >= 0.0) || !(lambda > 0.0))
    throw Error(ErrorKind::DomainError, "compute_D0 requires rho >= 0 and lambda > 0");
  const double c = lambda * kAlpha3;
  // Beyond R the inner integral is (c/2)(log 2s - 1/2 + 3/(8 s^2)) up to O(s^-4).
  const double R = std::max(rho, 400.0);
  const double tail = 0.5 * c * ((std::log(2.0 * R) + 0.5) / R + 1.0 / (8.0 * R * R * R));
  numerics::CompensatedSum outer;
  outer.add(tail);
  const auto g = [&](double s) {
    if (s == 0.0) return 0.5 * c;
    return inner_integral(s, lambda) / (s * s);
  };
  double lo = rho;
  while (lo < R) {
    const double hi = std::min(R, std::max(2.0 * lo, lo + 1.0));
    outer.add(numerics::integrate(g, lo, hi, 1e-15 * c, 1e-14).value);
    lo = hi;
  }
  return -outer.value();
}

double d0_closed_form(double rho, double lambda) {
  const double c = lambda * kAlpha3;
  const double ratio = rho < 1e-6 ? 1.0 - rho * rho / 6.0 : std::asinh(rho) / rho;
  return -0.5 * c * (1.0 / (std::sqrt(1.0 + rho * rho) + rho) + ratio);
}

}  // namespace concentra
