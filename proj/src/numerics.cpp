#include "concentra/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "concentra/errors.hpp"

namespace concentra::numerics {

double compensated_total(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

// Kronrod 15-point abscissae and weights with the embedded 7-point Gauss weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     double rel_tol, int max_panels) {
  std::priority_queue<Panel> queue;
  Panel first = gk15(f, a, b);
  queue.push(first);
  double total = first.value;
  double total_error = first.error;
  int panels = 1;
  while (!(total_error <= std::max(abs_tol, rel_tol * std::abs(total)))) {
    if (panels >= max_panels)
      throw Error(ErrorKind::QuadratureNotConverged,
                  "adaptive quadrature exhausted its panel budget (error estimate " +
                      std::to_string(total_error) + ")");
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  // Re-sum in a fixed order so the returned value does not depend on heap history.
  std::vector<Panel> all;
  all.reserve(queue.size());
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CompensatedSum value, error;
  for (const auto& p : all) {
    value.add(p.value);
    error.add(p.error);
  }
  return {value.value(), error.value(), 15 * (2 * panels - 1)};
}

RadialQuadResult integrate_to_infinity(const std::function<double(double)>& f,
                                       const std::function<double(double)>& tail_bound,
                                       double tol) {
  double cutoff = 1.0;
  while (tail_bound(cutoff) >= tol / 10.0) {
    cutoff *= 2.0;
    if (cutoff > 1e300)
      throw Error(ErrorKind::QuadratureNotConverged, "tail bound never drops below tolerance");
  }
  // Panels [0,1], [1,2], [2,4], ... keep the adaptive budget small for power tails.
  CompensatedSum value, error;
  const double panel_tol = 0.9 * tol / (2.0 + std::log2(cutoff));
  double lo = 0.0, hi = 1.0;
  while (lo < cutoff) {
    const auto r = integrate(f, lo, hi, panel_tol);
    value.add(r.value);
    error.add(r.error);
    lo = hi;
    hi = std::min(2.0 * hi, cutoff);
  }
  const double tail = tail_bound(cutoff);
  return {value.value(), error.value() + tail, cutoff, tail};
}

std::pair<double, double> bisect_predicate(const std::function<bool(double)>& pred, double lo,
                                           double hi, double tol, int max_iter) {
  for (int i = 0; i < max_iter && std::abs(hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

MinimumResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double x_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evaluations = 2;
  for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++evaluations;
  }
  if (f1 <= f2) return {x1, f1, evaluations};
  return {x2, f2, evaluations};
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& columns,
                                  std::span<const double> rhs, double* condition) {
  const std::size_t n = columns.size();
  const std::size_t m = rhs.size();
  // Scale columns to unit norm before forming the normal equations.
  std::vector<double> scale(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += columns[j][i] * columns[j][i];
    scale[j] = s > 0.0 ? 1.0 / std::sqrt(s) : 1.0;
  }
  // Householder QR on the scaled design matrix.
  std::vector<std::vector<double>> a(n, std::vector<double>(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) a[j][i] = columns[j][i] * scale[j];
  std::vector<double> b(rhs.begin(), rhs.end());
  std::vector<double> diag(n);
  for (std::size_t j = 0; j < n; ++j) {
    double norm_col = 0.0;
    for (std::size_t i = j; i < m; ++i) norm_col += a[j][i] * a[j][i];
    norm_col = std::sqrt(norm_col);
    if (norm_col == 0.0) throw Error(ErrorKind::FitIllConditioned, "rank-deficient design matrix");
    const double alpha = a[j][j] > 0 ? -norm_col : norm_col;
    std::vector<double> v(m, 0.0);
    for (std::size_t i = j; i < m; ++i) v[i] = a[j][i];
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) vnorm2 += v[i] * v[i];
    auto reflect = [&](std::vector<double>& col) {
      double d = 0.0;
      for (std::size_t i = j; i < m; ++i) d += v[i] * col[i];
      d = 2.0 * d / vnorm2;
      for (std::size_t i = j; i < m; ++i) col[i] -= d * v[i];
    };
    if (vnorm2 > 0.0) {
      for (std::size_t k = j; k < n; ++k) reflect(a[k]);
      reflect(b);
    }
    diag[j] = a[j][j];
  }
  double dmax = 0.0, dmin = std::abs(diag[0]);
  for (double d : diag) {
    dmax = std::max(dmax, std::abs(d));
    dmin = std::min(dmin, std::abs(d));
  }
  const double cond = dmin > 0.0 ? dmax / dmin : INFINITY;
  if (condition) *condition = cond;
  if (!(cond < 1e13)) throw Error(ErrorKind::FitIllConditioned, "design matrix is ill-conditioned");
  std::vector<double> x(n);
  for (std::size_t jj = n; jj-- > 0;) {
    double s = b[jj];
    for (std::size_t k = jj + 1; k < n; ++k) s -= a[k][jj] * x[k];
    x[jj] = s / a[jj][jj];
  }
  for (std::size_t j = 0; j < n; ++j) x[j] *= scale[j];
  return x;
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  const std::vector<std::vector<double>> cols = {std::vector<double>(lx.size(), 1.0), lx};
  const auto c = least_squares(cols, ly);
  return {c[1], c[0]};
}

FiniteDifference richardson_derivative(const std::function<double(double)>& f, double x,
                                       double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double f_plus = f(x + 0.5 * h);
  const double f_minus = f(x - 0.5 * h);
  const double d2 = (f_plus - f_minus) / h;
  const double value = (4.0 * d2 - d1) / 3.0;
  const double roundoff = 4.0 * std::numeric_limits<double>::epsilon() *
                          std::max(std::abs(f_plus), std::abs(f_minus)) / h;
  return {value, std::abs(d2 - d1) / 3.0 + roundoff, h};
}

FiniteDifference richardson_second_derivative(const std::function<double(double)>& f, double x,
                                              double h) {
  const double f0 = f(x);
  const double d1 = (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
  const double hh = 0.5 * h;
  const double d2 = (f(x + hh) - 2.0 * f0 + f(x - hh)) / (hh * hh);
  const double value = (4.0 * d2 - d1) / 3.0;
  const double roundoff = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(f0) / (hh * hh);
  return {value, std::abs(d2 - d1) / 3.0 + roundoff, h};
}

std::vector<double> chebyshev_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(std::numbers::pi * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace concentra::numerics
