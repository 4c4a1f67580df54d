#include "concentra/bessel.hpp"

#include <cmath>

namespace concentra::bessel {

std::vector<double> scaled_j(double x, int L) {
  std::vector<double> out(L + 1, 1.0);
  if (x == 0.0) return out;
  const double x2 = x * x;
  const int N = L + 60 + 2 * static_cast<int>(std::ceil(x));
  double above = 1.0;  // jhat_{l+1}
  double here = 1.0;   // jhat_l
  for (int l = N; l >= 1; --l) {
    const double below = here - above * x2 / ((2.0 * l + 1.0) * (2.0 * l + 3.0));
    above = here;
    here = below;
    if (l - 1 <= L) out[l - 1] = here;
    if (std::abs(here) > 1e250) {
      for (int m = l - 1; m <= L; ++m) out[m] *= 1e-250;
      here *= 1e-250;
      above *= 1e-250;
    }
  }
  // Normalize against whichever of j_0, j_1 is farther from a zero.
  const double j0 = std::sin(x) / x;
  const double j1 = (std::sin(x) / x - std::cos(x)) / x;
  double scale;
  if (std::abs(j0) >= std::abs(j1) || L < 1)
    scale = j0 / out[0];
  else
    scale = (3.0 * j1 / x) / out[1];
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> scaled_y(double x, int L) {
  std::vector<double> out(L + 1);
  if (x == 0.0) {
    for (double& v : out) v = 1.0;
    return out;
  }
  const double x2 = x * x;
  out[0] = std::cos(x);
  if (L >= 1) out[1] = std::cos(x) + x * std::sin(x);
  for (int l = 1; l < L; ++l)
    out[l + 1] = out[l] - out[l - 1] * x2 / ((2.0 * l + 1.0) * (2.0 * l - 1.0));
  return out;
}

}  // namespace concentra::bessel
