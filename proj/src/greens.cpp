#include "concentra/greens.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "concentra/bessel.hpp"
#include "concentra/errors.hpp"

namespace concentra {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;



void check_lambda(const Domain& d, double lambda) {
  if (!(lambda >= 0.0) || !(lambda < lambda1(d)))
    throw Error(ErrorKind::DomainError, "lambda must lie in [0, lambda1)");
}

void check_point(const Domain& d, const Point3& x) {
  if (!d.contains(x)) throw Error(ErrorKind::DomainError, "point is not interior to the domain");
}

}  // namespace

ModeCoefficients mode_coefficients(const Domain& d, double lambda, double s, double t, double tol) {
  if (s > t) std::swap(s, t);
  const double kappa = std::sqrt(lambda);
  const double a = d.inner_radius();
  const bool annulus = d.kind == Domain::Kind::Annulus;
  const double ratio = annulus ? std::max(s * t, a * a / (s * t)) : s * t;
  if (!(ratio < 1.0))
    throw Error(ErrorKind::PointsTooCloseToBoundary, "mode series does not converge");

  const int l_min = static_cast<int>(std::ceil(2.0 * kappa)) + 8;
  int predicted = l_min;
  if (ratio > 0.0) {
    const double need = std::log(tol * (1.0 - ratio) / 10.0) / std::log(ratio);
    if (need > kMaxModeOrder)
      throw Error(ErrorKind::PointsTooCloseToBoundary,
                  "predicted truncation order exceeds " + std::to_string(kMaxModeOrder));
    predicted = std::max(predicted, static_cast<int>(std::ceil(need)));
  }
  int L = std::min(predicted + 16, kMaxModeOrder);

  for (;;) {
    const auto js = bessel::scaled_j(kappa * s, L);
    const auto jt = bessel::scaled_j(kappa * t, L);
    const auto j1 = bessel::scaled_j(kappa, L);
    const auto ys = bessel::scaled_y(kappa * s, L);
    const auto yt = bessel::scaled_y(kappa * t, L);
    const auto y1 = bessel::scaled_y(kappa, L);
    std::vector<double> ja, ya;
    if (annulus) {
      ja = bessel::scaled_j(kappa * a, L);
      ya = bessel::scaled_y(kappa * a, L);
    }

    ModeCoefficients out;
    out.ratio = ratio;
    out.c.reserve(L + 1);
    double pow_st = 1.0;             // (s t)^l
    double pow_s_over_t = 1.0;       // (s/t)^l
    double pow_a2t_over_s = 1.0;     // (a^2 t / s)^l
    double pow_a2_over_st = 1.0;     // (a^2 / (s t))^l
    double pow_a = annulus ? a : 0.0;  // a^(2l+1)
    for (int l = 0; l <= L; ++l) {
      double coeff;
      if (!annulus) {
        if (std::abs(j1[l]) < 1e-14) throw Error(ErrorKind::ResonantMode, "j_l(sqrt(lambda)) = 0");
        coeff = pow_st * js[l] * jt[l] * y1[l] / j1[l];
      } else {
        const double den = pow_a * ja[l] * y1[l] - ya[l] * j1[l];
        if (std::abs(den) < 1e-14) throw Error(ErrorKind::ResonantMode, "radial determinant vanishes");
        const double t1 = y1[l] * ja[l] *
                          (pow_a * pow_s_over_t / t * js[l] * yt[l] +
                           pow_a2t_over_s * a / s * ys[l] * jt[l]);
        const double t2 = ya[l] * y1[l] * pow_st * js[l] * jt[l];
        const double t3 = ja[l] * j1[l] * pow_a2_over_st * a / (s * t) * ys[l] * yt[l];
        coeff = (t1 - t2 - t3) / den;
      }
      out.c.push_back(coeff / kFourPi);

      const double tail = 2.0 * std::abs(coeff / kFourPi) * ratio / (1.0 - ratio);
      if (l >= l_min && tail < tol) {
        out.order = l;
        out.tail = tail;
        return out;
      }
      pow_st *= s * t;
      if (annulus) {
        pow_s_over_t *= s / t;
        pow_a2t_over_s *= a * a * t / s;
        pow_a2_over_st *= a * a / (s * t);
        pow_a *= a * a;
      }
    }
    if (L >= kMaxModeOrder)
      throw Error(ErrorKind::PointsTooCloseToBoundary, "mode series did not reach tolerance");
    L = std::min(2 * L, kMaxModeOrder);
  }
}

Domain Domain::annulus(double inner) {
  if (!(inner > 0.0 && inner < 1.0))
    throw Error(ErrorKind::DomainError, "annulus inner radius must lie in (0, 1)");
  return {Kind::Annulus, inner};
}

bool Domain::contains(const Point3& x) const {
  const double r = norm(x);
  if (kind == Kind::UnitBall) return r < 1.0;
  return r < 1.0 && r > a;
}

double Domain::boundary_distance(const Point3& x) const {
  const double r = norm(x);
  if (kind == Kind::UnitBall) return 1.0 - r;
  return std::min(1.0 - r, r - a);
}

double lambda1(const Domain& d) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return pi2 / (d.thickness() * d.thickness());
}

double sum_legendre(const std::vector<double>& coeffs, double c) {
  numerics::CompensatedSum total;
  double p_prev = 1.0, p_cur = c;
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    if (l == 0) {
      total.add(coeffs[0]);
      continue;
    }
    total.add(coeffs[l] * p_cur);
    const double next = ((2.0 * l + 1.0) * c * p_cur - l * p_prev) / (l + 1.0);
    p_prev = p_cur;
    p_cur = next;
  }
  return total.value();
}

GreenEval smooth_part(const Domain& d, double lambda, const Point3& x, const Point3& y, double tol) {
  check_lambda(d, lambda);
  check_point(d, x);
  check_point(d, y);
  const double s = norm(x), t = norm(y);
  double c = 1.0;
  if (s > 0.0 && t > 0.0) c = std::clamp(dot(x, y) / (s * t), -1.0, 1.0);
  const ModeCoefficients m = mode_coefficients(d, lambda, s, t, tol);
  return {sum_legendre(m.c, c), m.order, m.tail};
}

GreenEval green(const Domain& d, double lambda, const Point3& x, const Point3& y, double tol) {
  const double R = distance(x, y);
  if (R < 1e-12) throw Error(ErrorKind::CoincidentPoints, "green requires x != y");
  GreenEval h = smooth_part(d, lambda, x, y, tol);
  h.value = std::cos(std::sqrt(lambda) * R) / (kFourPi * R) - h.value;
  return h;
}

GreenEval regular_part(const Domain& d, double lambda, const Point3& x, const Point3& y,
                       double tol) {
  GreenEval h = smooth_part(d, lambda, x, y, tol);
  const double R = distance(x, y);
  if (R > 0.0) {
    const double half = std::sin(0.5 * std::sqrt(lambda) * R);
    h.value += 2.0 * half * half / (kFourPi * R);
  }
  return h;
}

GreenEval robin(const Domain& d, double lambda, const Point3& x, double tol) {
  return regular_part(d, lambda, x, x, tol);
}

double annulus_series_term(double a, int m, double t) {
  const double n = 2.0 * m + 1.0;
  const double an = std::pow(a, n);
  const double num = std::pow(a / t, n) / t - 2.0 * an / t + std::pow(t, 2.0 * m);
  return num / (n * (1.0 - an));
}

namespace {

struct RawSeries {
  double value;
  int terms;
  double tail;
};

RawSeries raw_series(double a, double t, double tol, SeriesWeighting weighting, bool alternating) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::DomainError, "inner radius must lie in (0, 1)");
  if (!(t > a && t < 1.0))
    throw Error(ErrorKind::SeriesNotConverging, "|x| must lie strictly between a and 1");
  const double ratio = std::max(t * t, (a / t) * (a / t));
  numerics::CompensatedSum sum;
  for (int m = 0; m <= kMaxModeOrder; ++m) {
    const double w = weighting == SeriesWeighting::Multiplicity ? 2.0 * m + 1.0 : 1.0;
    const double term = w * annulus_series_term(a, m, t);
    sum.add(alternating && (m % 2 == 1) ? -term : term);
    const double tail = 2.0 * std::abs(term) * ratio / (1.0 - ratio);
    if (m >= 2 && tail < tol) return {sum.value(), m + 1, tail};
  }
  throw Error(ErrorKind::SeriesNotConverging, "series did not reach tolerance");
}

}  // namespace

double calibrate_omega2(double a, SeriesWeighting weighting) {
  static std::mutex mutex;
  static std::map<std::pair<double, int>, double> cache;
  const auto key = std::make_pair(a, static_cast<int>(weighting));
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double t_ref = 0.5 * (1.0 + a);
  const double engine = robin(Domain::annulus(a), 0.0, {t_ref, 0.0, 0.0}, 1e-15).value;
  const double raw = raw_series(a, t_ref, 1e-16, weighting, false).value;
  const double omega2 = raw / engine;
  std::lock_guard lock(mutex);
  cache.emplace(key, omega2);
  return omega2;
}

SeriesEval annulus_g0_series(double a, const Point3& x, double tol, SeriesWeighting weighting) {
  const RawSeries raw = raw_series(a, norm(x), tol, weighting, false);
  const double omega2 = calibrate_omega2(a, weighting);
  return {raw.value / omega2, omega2, raw.terms, raw.tail / omega2};
}

SeriesEval annulus_G0_antipodal(double a, const Point3& x, double tol, SeriesWeighting weighting) {
  const double t = norm(x);
  const RawSeries raw = raw_series(a, t, tol, weighting, true);
  const double omega2 = calibrate_omega2(a, weighting);
  return {(0.5 / t - raw.value) / omega2, omega2, raw.terms, raw.tail / omega2};
}

namespace {

Derivative lambda_difference(const Domain& d, double lambda, double h,
                             const std::function<double(double)>& f) {
  if (h <= 0.0) h = 1e-4 * lambda1(d);
  if (!(lambda - h > 0.0) || !(lambda + h < lambda1(d)))
    throw Error(ErrorKind::StepOutOfRange, "lambda +/- h leaves (0, lambda1)");
  return numerics::richardson_derivative(f, lambda, h);
}

}  // namespace

Derivative d_lambda_robin(const Domain& d, double lambda, const Point3& x, double h, double tol) {
  return lambda_difference(d, lambda, h, [&](double l) { return robin(d, l, x, tol).value; });
}

Derivative d_lambda_green(const Domain& d, double lambda, const Point3& x, const Point3& y,
                          double h, double tol) {
  return lambda_difference(d, lambda, h, [&](double l) { return green(d, l, x, y, tol).value; });
}

}  // namespace concentra
