#include "concentra/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "concentra/errors.hpp"
#include "concentra/parallel.hpp"

namespace concentra {

std::vector<double> Matrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    numerics::CompensatedSum s;
    for (int j = 0; j < n; ++j) s.add((*this)(i, j) * v[j]);
    out[i] = s.value();
  }
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

InteractionMatrix build_matrix(const Domain& d, double lambda, const std::vector<Point3>& zeta,
                               double tol) {
  const int k = static_cast<int>(zeta.size());
  if (k < 1) throw Error(ErrorKind::InvalidConfiguration, "at least one point is required");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (distance(zeta[i], zeta[j]) < 1e-8)
        throw Error(ErrorKind::DuplicatePoints, "points " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " coincide");
  InteractionMatrix out;
  out.m = Matrix(k);
  out.lambda = lambda;
  out.points = zeta;
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) cells.emplace_back(i, j);
  std::vector<GreenEval> evals(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    if (i == j) {
      evals[c] = robin(d, lambda, zeta[i], tol);
    } else {
      evals[c] = green(d, lambda, zeta[i], zeta[j], tol);
      evals[c].value = -evals[c].value;
    }
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    out.m(i, j) = evals[c].value;
    out.m(j, i) = evals[c].value;
    out.max_order = std::max(out.max_order, evals[c].order);
    out.max_tail = std::max(out.max_tail, evals[c].tail_bound);
  }
  return out;
}

double psi(const Matrix& m) {
  const int n = m.n;
  Matrix lu = m;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(lu(pivot, c), lu(col, c));
      det = -det;
    }
    det *= lu(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      for (int c = col + 1; c < n; ++c) lu(r, c) -= f * lu(col, c);
    }
  }
  return det;
}

std::vector<double> EigenDecomp::vector(int i) const {
  std::vector<double> v(vectors.n);
  for (int r = 0; r < vectors.n; ++r) v[r] = vectors(r, i);
  return v;
}

EigenDecomp eigen(const Matrix& m) {
  const int n = m.n;
  if (n > kMaxEigenSize)
    throw Error(ErrorKind::InvalidConfiguration, "eigen supports k <= " + std::to_string(kMaxEigenSize));
  Matrix a = m;
  Matrix v(n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  const auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  const double scale = std::max(m.max_abs(), 1e-300);
  bool converged = n <= 1;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    if (off_norm() <= 1e-17 * scale) {
      converged = true;
      break;
    }
    const double threshold = sweep < 3 ? 0.2 * off_norm() / (n * n) : 0.0;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold || apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }
  if (!converged && off_norm() > 1e-14 * scale)
    throw Error(ErrorKind::NoConvergence, "Jacobi iteration did not converge");

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  EigenDecomp out;
  out.vectors = Matrix(n);
  for (int c = 0; c < n; ++c) {
    const int src = order[c];
    out.values.push_back(a(src, src));
    int big = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(big, src))) big = r;
    const double sign = v(big, src) < 0.0 ? -1.0 : 1.0;
    for (int r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
  }
  return out;
}

std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row) {
  const int k = static_cast<int>(first_row.size());
  double scale = 0.0;
  for (double x : first_row) scale = std::max(scale, std::abs(x));
  for (int j = 1; j < k; ++j)
    if (std::abs(first_row[j] - first_row[k - j]) > 1e-12 * scale)
      throw Error(ErrorKind::AsymmetricRow, "first row violates a_j = a_{k-j} at j = " + std::to_string(j));
  std::vector<double> nu(k);
  for (int l = 0; l < k; ++l) {
    numerics::CompensatedSum re, im;
    for (int j = 0; j < k; ++j) {
      const int phase = (j * l) % k;
      const double angle = 2.0 * std::numbers::pi * phase / k;
      re.add(first_row[j] * std::cos(angle));
      im.add(first_row[j] * std::sin(angle));
    }
    if (std::abs(im.value()) > 1e-12 * std::max(scale, 1e-300) * k)
      throw Error(ErrorKind::AsymmetricRow, "circulant eigenvalue has an imaginary part");
    nu[l] = re.value();
  }
  return nu;
}

ReducedEnergy reduced_energy_F(const Matrix& m, const std::vector<double>& Lambda, double lambda,
                               const EnergyConstants& consts) {
  const int k = m.n;
  if (static_cast<int>(Lambda.size()) != k)
    throw Error(ErrorKind::InvalidConfiguration, "Lambda has the wrong dimension");
  const double a0 = consts.a0.closed_form, a1 = consts.a1.closed_form;
  const double a2 = consts.a2.closed_form, a3 = consts.a3.closed_form;
  const std::vector<double> ml = m.apply(Lambda);
  numerics::CompensatedSum value;
  value.add(k * a0);
  for (int i = 0; i < k; ++i) {
    const double l2 = Lambda[i] * Lambda[i];
    value.add(a1 * Lambda[i] * ml[i]);
    value.add(a2 * lambda * l2 * l2);
    value.add(-a3 * l2 * ml[i] * ml[i]);
  }
  ReducedEnergy out{value.value(), std::vector<double>(k)};
  for (int p = 0; p < k; ++p) {
    numerics::CompensatedSum g;
    g.add(2.0 * a1 * ml[p]);
    g.add(4.0 * a2 * lambda * Lambda[p] * Lambda[p] * Lambda[p]);
    g.add(-2.0 * a3 * Lambda[p] * ml[p] * ml[p]);
    for (int i = 0; i < k; ++i) g.add(-2.0 * a3 * Lambda[i] * Lambda[i] * ml[i] * m(i, p));
    out.grad[p] = g.value();
  }
  return out;
}

PsiDerivatives psi_derivatives(const Domain& d, double lambda, const std::vector<Point3>& zeta,
                               double tol, double step) {
  const int k = static_cast<int>(zeta.size());
  const int n = 3 * k;
  const double h = step > 0.0 ? step : 1e-3 * d.thickness();
  for (const auto& z : zeta)
    if (d.boundary_distance(z) <= h)
      throw Error(ErrorKind::StencilLeavesDomain, "finite-difference stencil leaves the domain");

  const auto psi_at = [&](const std::vector<Point3>& pts, double lam) {
    return psi(build_matrix(d, lam, pts, tol));
  };
  const auto shifted = [&](std::vector<std::pair<int, double>> moves) {
    std::vector<Point3> pts = zeta;
    for (auto [idx, delta] : moves) pts[idx / 3][idx % 3] += delta;
    return pts;
  };

  PsiDerivatives out;
  out.step = h;
  out.grad.resize(n);
  out.grad_error.resize(n);
  out.hessian = Matrix(n);
  out.hessian_error = Matrix(n);
  for (int i = 0; i < n; ++i) {
    const auto fd = numerics::richardson_derivative(
        [&](double t) { return psi_at(shifted({{i, t}}), lambda); }, 0.0, h);
    out.grad[i] = fd.value;
    out.grad_error[i] = fd.error;
  }
  const double psi0 = psi_at(zeta, lambda);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      numerics::FiniteDifference fd;
      if (i == j) {
        fd = numerics::richardson_second_derivative(
            [&](double t) { return t == 0.0 ? psi0 : psi_at(shifted({{i, t}}), lambda); }, 0.0, h);
      } else {
        const auto mixed = [&](double s) {
          return (psi_at(shifted({{i, s}, {j, s}}), lambda) - psi_at(shifted({{i, s}, {j, -s}}), lambda) -
                  psi_at(shifted({{i, -s}, {j, s}}), lambda) + psi_at(shifted({{i, -s}, {j, -s}}), lambda)) /
                 (4.0 * s * s);
        };
        const double d1 = mixed(h), d2 = mixed(0.5 * h);
        fd = {(4.0 * d2 - d1) / 3.0, std::abs(d2 - d1) / 3.0, h};
      }
      out.hessian(i, j) = out.hessian(j, i) = fd.value;
      out.hessian_error(i, j) = out.hessian_error(j, i) = fd.error;
    }
  }
  out.hessian_eigenvalues = eigen(out.hessian).values;
  out.d_lambda = numerics::richardson_derivative([&](double lam) { return psi_at(zeta, lam); },
                                                 lambda, std::min(1e-4 * lambda1(d), 0.5 * lambda));
  return out;
}

}  // namespace concentra
