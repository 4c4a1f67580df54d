#include "concentra/energy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "concentra/errors.hpp"
#include "concentra/interaction.hpp"
#include "concentra/numerics.hpp"
#include "concentra/parallel.hpp"

namespace concentra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// (w + d)^5 - w^5 without cancellation.
double fifth_power_excess(double w, double d) {
  return d * (5.0 * w * w * w * w + d * (10.0 * w * w * w + d * (10.0 * w * w + d * (5.0 * w + d))));
}

double regular_from_smooth(double smooth, double lambda, double R) {
  if (R <= 0.0) return smooth;
  const double half = std::sin(0.5 * std::sqrt(lambda) * R);
  return smooth + 2.0 * half * half / (kFourPi * R);
}

// Assembles U0 from the regular parts H(x, zeta_i).
AnsatzPoint assemble(const Ansatz& A, const Point3& x, const std::vector<double>& H) {
  const std::size_t k = A.bubbles.size();
  AnsatzPoint p;
  p.w.resize(k);
  p.pi.resize(k);
  p.d0.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& b = A.bubbles[i];
    const double rho = distance(x, b.center);
    p.w[i] = eval_bubble(b, x);
    const double d0 = b.mu * std::sqrt(b.mu) * d0_closed_form(rho / b.mu, A.lambda);
    p.d0[i] = d0;
    p.pi[i] = -kFourPi * kAlpha3 * std::sqrt(b.mu) * H[i] + d0;
    if (p.w[i] > p.w[p.dominant]) p.dominant = static_cast<int>(i);
  }
  numerics::CompensatedSum excess;
  for (std::size_t i = 0; i < k; ++i) {
    excess.add(p.pi[i]);
    if (static_cast<int>(i) != p.dominant) excess.add(p.w[i]);
  }
  p.excess = excess.value();
  p.u = k == 0 ? 0.0 : p.w[p.dominant] + p.excess;
  return p;
}

// U0^5 - sum w_i^5
double nonlinear_error(const AnsatzPoint& p) {
  if (p.w.empty()) return 0.0;
  numerics::CompensatedSum s;
  s.add(fifth_power_excess(p.w[p.dominant], p.excess));
  for (std::size_t i = 0; i < p.w.size(); ++i)
    if (static_cast<int>(i) != p.dominant) s.add(-std::pow(p.w[i], 5));
  return s.value();
}

}  // namespace

Ansatz build_ansatz(const Domain& d, double lambda, const std::vector<BubbleParams>& bubbles,
                    double green_tol) {
  if (!(lambda >= 0.0 && lambda < lambda1(d)))
    throw Error(ErrorKind::InvalidConfiguration, "lambda must lie in [0, lambda1)");
  for (std::size_t i = 0; i < bubbles.size(); ++i) {
    const auto& b = bubbles[i];
    if (!(b.mu > 0.0)) throw Error(ErrorKind::InvalidConfiguration, "mu must be positive");
    if (!d.contains(b.center)) throw Error(ErrorKind::InvalidConfiguration, "center outside the domain");
    double sep = d.boundary_distance(b.center);
    for (std::size_t j = 0; j < bubbles.size(); ++j) {
      if (j == i) continue;
      const double dist = distance(b.center, bubbles[j].center);
      if (dist < 1e-8) throw Error(ErrorKind::InvalidConfiguration, "coincident centers");
      sep = std::min(sep, dist);
    }
    if (b.mu > 0.2 * sep * (1.0 + 1e-12))
      throw Error(ErrorKind::InvalidConfiguration,
                  "mu exceeds 0.2 * min(pairwise distance, boundary distance)");
  }
  return {d, lambda, bubbles, green_tol};
}

Ansatz polygon_ansatz(const Domain& d, double lambda, const std::vector<Point3>& centers, double mu,
                      double green_tol) {
  std::vector<BubbleParams> b;
  for (const auto& c : centers) b.push_back({mu, c});
  return build_ansatz(d, lambda, b, green_tol);
}

AnsatzPoint eval_ansatz(const Ansatz& A, const Point3& x) {
  std::vector<double> H(A.bubbles.size());
  for (std::size_t i = 0; i < A.bubbles.size(); ++i)
    H[i] = regular_part(A.domain, A.lambda, x, A.bubbles[i].center, A.green_tol).value;
  return assemble(A, x, H);
}

double ansatz_value(const Ansatz& A, const Point3& x) { return eval_ansatz(A, x).u; }

double ansatz_residual(const Ansatz& A, const Point3& x) {
  const AnsatzPoint p = eval_ansatz(A, x);
  numerics::CompensatedSum s;
  s.add(nonlinear_error(p));
  for (double d0 : p.d0) s.add(A.lambda * d0);
  return s.value();
}

double ansatz_residual_fd(const Ansatz& A, const Point3& x, double h) {
  for (int axis = 0; axis < 3; ++axis)
    for (double sgn : {-2.0, 2.0}) {
      Point3 y = x;
      y[axis] += sgn * h;
      if (!A.domain.contains(y))
        throw Error(ErrorKind::StencilLeavesDomain, "finite-difference stencil leaves the domain");
    }
  const double u0 = ansatz_value(A, x);
  numerics::CompensatedSum lap;
  for (int axis = 0; axis < 3; ++axis) {
    const auto at = [&](double offset) {
      Point3 y = x;
      y[axis] += offset;
      return ansatz_value(A, y);
    };
    lap.add((-at(2.0 * h) + 16.0 * at(h) - 30.0 * u0 + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h));
  }
  return lap.value() + A.lambda * u0 + std::pow(u0, 5);
}

double error_E(const Ansatz& A, double eps, const Point3& y) {
  if (A.bubbles.empty()) return 0.0;
  const Point3 x = eps * y;
  if (!A.domain.contains(x)) throw Error(ErrorKind::DomainError, "eps * y lies outside the domain");
  return std::pow(eps, 2.5) * nonlinear_error(eval_ansatz(A, x));
}

double norm_weight(const Ansatz& A, double eps, const Point3& y) {
  double w = 0.0;
  for (const auto& b : A.bubbles) w += 1.0 / (1.0 + distance(y, (1.0 / eps) * b.center));
  return w;
}

namespace {

// Fibonacci sphere directions, deterministic.
std::vector<Point3> sphere_directions(int n) {
  std::vector<Point3> out;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
  }
  return out;
}

}  // namespace

NormResult norm_star_star(const Ansatz& A, double eps, double nu, int sample_budget) {
  if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorKind::DomainError, "nu must lie in (0, 1)");
  const double margin = 1e-3 * A.domain.thickness();
  std::vector<Point3> xs;  // physical sample points
  const int k = static_cast<int>(A.bubbles.size());
  const int grid_n = std::max(4, static_cast<int>(std::cbrt(0.25 * sample_budget)));
  const int per_center = k > 0 ? (sample_budget - grid_n * grid_n * grid_n) / k : 0;
  const int n_dir = std::max(6, static_cast<int>(std::sqrt(per_center / 2.0)));
  const int n_shell = std::max(4, per_center / n_dir);
  const auto dirs = sphere_directions(n_dir);
  for (const auto& b : A.bubbles) {
    xs.push_back(b.center);
    const double r_lo = 1e-2 * b.mu;
    const double r_hi = 2.0;
    for (int s = 0; s < n_shell; ++s) {
      const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(s) / (n_shell - 1));
      for (const auto& u : dirs) {
        const Point3 x = b.center + r * u;
        if (A.domain.contains(x) && A.domain.boundary_distance(x) > margin) xs.push_back(x);
      }
    }
  }
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j)
      for (int l = 0; l < grid_n; ++l) {
        const auto c = [&](int m) { return -1.0 + (2.0 * m + 1.0) / grid_n; };
        const Point3 x{c(i), c(j), c(l)};
        if (A.domain.contains(x) && A.domain.boundary_distance(x) > margin) xs.push_back(x);
      }

  std::vector<double> vals(xs.size());
  parallel_for(xs.size(), [&](std::size_t n) {
    const Point3 y = (1.0 / eps) * xs[n];
    vals[n] = std::pow(norm_weight(A, eps, y), -(2.0 + nu)) * std::abs(error_E(A, eps, y));
  });
  NormResult out;
  out.samples = static_cast<int>(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n)
    if (vals[n] > out.value) {
      out.value = vals[n];
      out.argmax = (1.0 / eps) * xs[n];
    }
  return out;
}

namespace {

struct ChartFrame {
  Point3 axis, e1, e2;
};

ChartFrame chart_frame(const Point3& center) {
  const double t = norm(center);
  const Point3 ez{0.0, 0.0, 1.0};
  ChartFrame f;
  f.axis = t > 0.0 ? (1.0 / t) * center : ez;
  Point3 ref = ez;
  if (norm(cross(f.axis, ez)) < 1e-12) ref = {1.0, 0.0, 0.0};
  const Point3 proj = ref - dot(ref, f.axis) * f.axis;
  f.e1 = (1.0 / norm(proj)) * proj;
  f.e2 = cross(f.axis, f.e1);
  return f;
}

struct AngularNode {
  double c;       // cos(theta)
  double weight;  // d(cos theta) weight
};

std::vector<AngularNode> angular_nodes(const Domain& d, double t0, int n) {
  const auto& g = numerics::gauss_legendre(n);
  std::vector<AngularNode> nodes;
  const auto straight = [&](double lo, double hi) {
    for (int i = 0; i < n; ++i)
      nodes.push_back({0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i], 0.5 * (hi - lo) * g.weights[i]});
  };
  const double a = d.inner_radius();
  if (d.kind == Domain::Kind::Annulus && t0 > a) {
    const double ct = -std::sqrt(t0 * t0 - a * a) / t0;
    straight(ct, 1.0);
    // c = ct - (1 + ct) u^2 removes the square-root behaviour at the tangent cone.
    for (int i = 0; i < n; ++i) {
      const double u = 0.5 + 0.5 * g.nodes[i];
      nodes.push_back({ct - (1.0 + ct) * u * u, 0.5 * g.weights[i] * 2.0 * (1.0 + ct) * u});
    }
  } else {
    straight(-1.0, 1.0);
  }
  return nodes;
}

}  // namespace

double energy_at_level(const Ansatz& A, int level, long* evaluations) {
  const int k = static_cast<int>(A.bubbles.size());
  if (k == 0) return 0.0;
  const double width = 1.0 / (level + 1.0);
  const int n_c = 16 + 8 * level;
  const int n_phi = 8 + 4 * level;
  const auto& gr = numerics::gauss_legendre(8);
  const double a = A.domain.inner_radius();
  const bool annulus = A.domain.kind == Domain::Kind::Annulus;

  struct Task {
    int chart;
    AngularNode node;
  };
  std::vector<Task> tasks;
  std::vector<ChartFrame> frames;
  for (int i = 0; i < k; ++i) {
    frames.push_back(chart_frame(A.bubbles[i].center));
    for (const auto& nd : angular_nodes(A.domain, norm(A.bubbles[i].center), n_c)) tasks.push_back({i, nd});
  }
  std::vector<double> partial(tasks.size());
  std::vector<long> counts(tasks.size(), 0);

  parallel_for(tasks.size(), [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const auto& bubble = A.bubbles[task.chart];
    const ChartFrame& f = frames[task.chart];
    const double mu = bubble.mu;
    const double t0 = norm(bubble.center);
    const double c = task.node.c;
    const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double b = t0 * c;
    const double rho_out = -b + std::sqrt(b * b - t0 * t0 + 1.0);
    std::vector<std::pair<double, double>> segments;
    const double disc = b * b - t0 * t0 + a * a;
    if (annulus && disc > 0.0 && -b - std::sqrt(disc) > 0.0) {
      segments.emplace_back(0.0, -b - std::sqrt(disc));
      segments.emplace_back(-b + std::sqrt(disc), rho_out);
    } else {
      segments.emplace_back(0.0, rho_out);
    }

    std::vector<double> H(k);
    numerics::CompensatedSum sum;
    for (const auto& [ra, rb] : segments) {
      const double ta = std::asinh(ra / mu), tb = std::asinh(rb / mu);
      const int panels = std::max(1, static_cast<int>(std::ceil((tb - ta) / width)));
      const double h = (tb - ta) / panels;
      for (int p = 0; p < panels; ++p) {
        for (int q = 0; q < 8; ++q) {
          const double t = ta + h * (p + 0.5 + 0.5 * gr.nodes[q]);
          const double rho = mu * std::sinh(t);
          const double radial_w = 0.5 * h * gr.weights[q] * mu * std::cosh(t) * rho * rho;
          // |x| is independent of phi, so the mode coefficients are shared along the circle.
          const Point3 x_axis = bubble.center + (rho * c) * f.axis;
          std::map<double, ModeCoefficients> coeffs;
          numerics::CompensatedSum ring;
          for (int m = 0; m < n_phi; ++m) {
            const double phi = 2.0 * kPi * m / n_phi;
            const Point3 x = x_axis + (rho * sn * std::cos(phi)) * f.e1 + (rho * sn * std::sin(phi)) * f.e2;
            const double s = norm(x);
            for (int j = 0; j < k; ++j) {
              const Point3& z = A.bubbles[j].center;
              const double tz = norm(z);
              auto it = coeffs.find(tz);
              if (it == coeffs.end())
                it = coeffs.emplace(tz, mode_coefficients(A.domain, A.lambda, s, tz, A.green_tol)).first;
              double cg = 1.0;
              if (s > 0.0 && tz > 0.0) cg = std::clamp(dot(x, z) / (s * tz), -1.0, 1.0);
              H[j] = regular_from_smooth(sum_legendre(it->second.c, cg), A.lambda, distance(x, z));
            }
            const AnsatzPoint pt = assemble(A, x, H);
            double w6 = 0.0, w5 = 0.0;
            for (double w : pt.w) {
              w5 += std::pow(w, 5);
              w6 += std::pow(w, 6);
            }
            const double chi = std::pow(pt.w[task.chart], 6) / w6;
            const double u = pt.u;
            ring.add(chi * (0.5 * w5 * u - std::pow(u, 6) / 6.0));
            ++counts[ti];
          }
          sum.add(radial_w * ring.value() * (2.0 * kPi / n_phi));
        }
      }
    }
    partial[ti] = sum.value() * task.node.weight;
  });

  numerics::CompensatedSum total;
  for (double v : partial) total.add(v);
  if (evaluations) {
    long n = 0;
    for (long c : counts) n += c;
    *evaluations = n;
  }
  return total.value();
}

EnergyResult energy(const Ansatz& A, double tol, int max_level) {
  EnergyResult out;
  long evals = 0;
  double prev = energy_at_level(A, 0, &evals);
  out.evaluations = evals;
  for (int level = 1; level <= max_level; ++level) {
    const double cur = energy_at_level(A, level, &evals);
    out.evaluations += evals;
    out.value = cur;
    out.error = std::abs(cur - prev);
    out.level = level;
    if (out.error <= tol) return out;
    prev = cur;
  }
  throw Error(ErrorKind::QuadratureNotConverged,
              "energy quadrature levels disagree by " + std::to_string(out.error));
}

double ExpansionFit::c1_relative_error() const { return std::abs(c1 - c1_target) / std::abs(c1_target); }
double ExpansionFit::c2_relative_error() const { return std::abs(c2 - c2_target) / std::abs(c2_target); }

ExpansionFit expansion_fit(const Domain& d, const PolygonConfig& config, double lambda,
                           const std::vector<double>& mu_grid, const EnergyConstants& consts,
                           double tol) {
  if (mu_grid.size() < 4) throw Error(ErrorKind::FitIllConditioned, "need at least four mu values");
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 0.0 && mu_grid[i] <= 0.1))
      throw Error(ErrorKind::FitIllConditioned, "mu grid must lie in (0, 0.1]");
    if (i > 0 && !(mu_grid[i] < mu_grid[i - 1]))
      throw Error(ErrorKind::FitIllConditioned, "mu grid must be strictly descending");
  }
  const auto centers = polygon_points(config);
  const auto m = build_matrix(d, lambda, centers, 1e-14);
  ExpansionFit fit;
  fit.sigma1 = numerics::compensated_total(std::vector<double>(m.m.data.begin(), m.m.data.begin() + m.size()));
  const int k = config.k;
  fit.c1_target = consts.a1.closed_form * k * fit.sigma1;
  fit.c2_target = consts.a2.closed_form * lambda * k - consts.a3.closed_form * k * fit.sigma1 * fit.sigma1;

  fit.mu = mu_grid;
  for (double mu : mu_grid) {
    const auto result = energy(polygon_ansatz(d, lambda, centers, mu), tol);
    fit.excess.push_back(result.value - k * consts.a0.closed_form);
    fit.quad_error.push_back(result.error);
  }
  std::vector<std::vector<double>> cols(3, std::vector<double>(mu_grid.size()));
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    cols[0][i] = mu_grid[i];
    cols[1][i] = mu_grid[i] * mu_grid[i];
    cols[2][i] = mu_grid[i] * mu_grid[i] * mu_grid[i];
  }
  const auto c = numerics::least_squares(cols, fit.excess, &fit.condition);
  fit.c1 = c[0];
  fit.c2 = c[1];
  fit.c3 = c[2];
  std::vector<double> resid(mu_grid.size());
  for (std::size_t i = 0; i < mu_grid.size(); ++i)
    resid[i] = fit.excess[i] - fit.c1 * mu_grid[i] - fit.c2 * mu_grid[i] * mu_grid[i];
  fit.order = numerics::fit_power_law(mu_grid, resid).exponent;
  return fit;
}

}  // namespace concentra
