#pragma once

#include <vector>

namespace concentra::bessel {

// Scaled spherical Bessel functions, bounded and O(1) for l >> x:
//   jhat_l(x) = j_l(x) (2l+1)!! / x^l      (jhat_l(0) = 1)
//   yhat_l(x) = -y_l(x) x^(l+1) / (2l-1)!!  ((-1)!! = 1)

/// jhat_0..jhat_L by downward (Miller) recurrence.
std::vector<double> scaled_j(double x, int L);

/// yhat_0..yhat_L by upward recurrence.
std::vector<double> scaled_y(double x, int L);

}  // namespace concentra::bessel
