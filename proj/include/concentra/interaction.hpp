#pragma once

#include <vector>

#include "concentra/bubble.hpp"
#include "concentra/greens.hpp"
#include "concentra/numerics.hpp"
#include "concentra/point.hpp"

namespace concentra {

/// Dense square matrix, row-major.
struct Matrix {
  int n = 0;
  std::vector<double> data;

  Matrix() = default;
  explicit Matrix(int size) : n(size), data(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
  std::vector<double> apply(const std::vector<double>& v) const;
  double max_abs() const;
};

struct InteractionMatrix {
  Matrix m;
  double lambda = 0.0;
  std::vector<Point3> points;
  int max_order = 0;        // largest mode truncation used by any entry
  double max_tail = 0.0;    // largest tail bound of any entry
  int size() const { return m.n; }
};

/// Diagonal g(zeta_i), off-diagonal -G(zeta_i, zeta_j). Entries are evaluated in parallel.
InteractionMatrix build_matrix(const Domain& d, double lambda, const std::vector<Point3>& zeta,
                               double tol);

/// Determinant via LU with partial pivoting.
double psi(const Matrix& m);
inline double psi(const InteractionMatrix& m) { return psi(m.m); }

struct EigenDecomp {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column i pairs with values[i]
  std::vector<double> vector(int i) const;
};

inline constexpr int kMaxEigenSize = 64;

/// Cyclic Jacobi. Each eigenvector is signed so its largest-magnitude component is positive.
EigenDecomp eigen(const Matrix& m);
inline EigenDecomp eigen(const InteractionMatrix& m) { return eigen(m.m); }

/// nu_l = sum_j a_j exp(2 pi i j l / k), l = 0..k-1, in that order.
std::vector<double> circulant_eigenvalues(const std::vector<double>& first_row);

struct ReducedEnergy {
  double value = 0.0;
  std::vector<double> grad;
};

/// k a0 + a1 L^T M L + a2 lambda sum L_i^4 - a3 sum L_i^2 (M L)_i^2 with its exact gradient.
ReducedEnergy reduced_energy_F(const Matrix& m, const std::vector<double>& Lambda, double lambda,
                               const EnergyConstants& consts);

struct PsiDerivatives {
  double step = 0.0;
  std::vector<double> grad;        // d psi / d zeta_{i,c}, index 3 i + c
  std::vector<double> grad_error;
  numerics::FiniteDifference d_lambda;
  Matrix hessian;
  Matrix hessian_error;
  std::vector<double> hessian_eigenvalues;
};

/// Finite differences of psi on build_matrix. step <= 0 selects 1e-3 * thickness.
PsiDerivatives psi_derivatives(const Domain& d, double lambda, const std::vector<Point3>& zeta,
                               double tol = 1e-13, double step = 0.0);

}  // namespace concentra
