#include <doctest.h>

#include <cmath>

#include "concentra/bessel.hpp"

using namespace concentra;

namespace {

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

TEST_CASE("scaled bessel functions against the standard library") {
  for (double x : {1e-3, 0.3, 1.0, 3.7, 12.0, 31.4}) {
    const int L = 40;
    const auto j = bessel::scaled_j(x, L);
    const auto y = bessel::scaled_y(x, L);
    for (int l = 0; l <= L; ++l) {
      const double jref = std::sph_bessel(l, x) * double_factorial(2 * l + 1) / std::pow(x, l);
      const double yref = -std::sph_neumann(l, x) * std::pow(x, l + 1) / double_factorial(2 * l - 1);
      if (std::isfinite(jref) && std::abs(jref) > 1e-250)
        CHECK(std::abs(j[l] - jref) <= 1e-11 * std::abs(jref) + 1e-300);
      if (std::isfinite(yref) && std::abs(yref) < 1e250)
        CHECK(std::abs(y[l] - yref) <= 1e-11 * std::abs(yref));
    }
  }
}

TEST_CASE("scaled bessel limits") {
  const auto j = bessel::scaled_j(0.0, 10);
  for (double v : j) CHECK(v == doctest::Approx(1.0));
  const auto big = bessel::scaled_j(1e-4, 3000);
  CHECK(big[3000] == doctest::Approx(1.0).epsilon(1e-9));
  const auto y = bessel::scaled_y(1e-4, 5);
  CHECK(y[0] == doctest::Approx(std::cos(1e-4)));
}
