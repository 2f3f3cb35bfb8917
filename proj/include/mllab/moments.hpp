#pragma once

#include <cmath>
#include <vector>

#include "mllab/dyadic.hpp"

namespace mllab {

/// Multi-indices |alpha| <= K for the given dimension, graded order.
inline std::vector<std::array<int, 2>> multi_indices(int dim, int K) {
  std::vector<std::array<int, 2>> out;
  for (int total = 0; total <= K; ++total) {
    if (dim == 1) {
      out.push_back({total, 0});
    } else {
      for (int a = total; a >= 0; --a) out.push_back({a, total - a});
    }
  }
  return out;
}

namespace detail {

// Exact integral over [a,b) of ((x-c)/len)^j dx.
inline double monomial_cell_integral(double a, double b, double c, double len, int j) {
  const double u0 = (a - c) / len, u1 = (b - c) / len;
  return len * (std::pow(u1, j + 1) - std::pow(u0, j + 1)) / (j + 1);
}

}  // namespace detail

/// Exact integral over a grid cell of the centered scaled monomial
/// prod_i ((x_i - c_i)/l)^{alpha_i}, where c is the center and l the side
/// of the reference cube.
inline double monomial_integral_on_cell(const DyadicCube& cell, const DyadicCube& ref,
                                        std::array<int, 2> alpha) {
  double out = 1.0;
  const double len = ref.side();
  for (int a = 0; a < cell.dim; ++a)
    out *= detail::monomial_cell_integral(cell.low(a), cell.high(a), ref.center(a), len,
                                          a < 1 ? alpha[0] : alpha[1]);
  return out;
}

/// Integral of f times the centered scaled monomial of `ref` (exact cell sums).
inline double moment_of(const StepFunction& f, const DyadicCube& ref, std::array<int, 2> alpha) {
  double s = 0.0;
  for (const auto& [k, v] : f.cells)
    s += v * monomial_integral_on_cell(f.cell_cube(k), ref, alpha);
  return s;
}

/// Moment residuals |int f phi_alpha| / (||f||_inf |Q|) for |alpha| <= K.
inline std::vector<double> moment_residuals(const StepFunction& f, const DyadicCube& ref, int K) {
  std::vector<double> out;
  const double denom = f.sup_norm() * ref.volume();
  for (const auto& alpha : multi_indices(f.dim, K))
    out.push_back(denom == 0.0 ? 0.0 : std::fabs(moment_of(f, ref, alpha)) / denom);
  return out;
}

inline double max_moment_residual(const StepFunction& f, const DyadicCube& ref, int K) {
  double m = 0.0;
  for (double r : moment_residuals(f, ref, K)) m = std::fmax(m, r);
  return m;
}

/// L^2(Q)-orthogonal projection of f|_Q onto the span of cellwise-averaged
/// centered monomials of degree <= K, returned as a step function on the
/// cells of Q at f.level.
///
/// The normal equations make int_Q (f - Pf) x^alpha dx vanish for every kept
/// direction; directions whose averaged monomial is linearly dependent on
/// the kept ones (e.g. odd monomials on a single cell) are dropped by the
/// pivot threshold, and their moments vanish through the dependence, so all
/// moments up to K cancel. K <= 3 supported.
inline StepFunction project_polynomial(const StepFunction& f, const DyadicCube& cube, int K,
                                       double pivot_tol = 1e-12) {
  if (K < 0) return StepFunction(f.dim, f.level);
  if (K > 3) throw std::domain_error("project_polynomial: cancellation degree K > 3 unsupported");
  if (cube.level > f.level)
    throw std::invalid_argument("project_polynomial: cube finer than the grid");

  const auto alphas = multi_indices(f.dim, K);
  const int nb = static_cast<int>(alphas.size());
  const int s = f.level - cube.level;
  const std::int64_t n = std::int64_t{1} << s;
  const double hvol = std::ldexp(1.0, -f.level * f.dim);

  // All cells of Q at f.level and the averaged-basis values on them.
  std::vector<CellIndex> cell_idx;
  std::vector<std::vector<double>> basis_avg(nb);
  const std::int64_t n1 = f.dim == 2 ? n : 1;
  for (std::int64_t dx = 0; dx < n; ++dx)
    for (std::int64_t dy = 0; dy < n1; ++dy) {
      CellIndex k{(cube.index[0] << s) + dx, f.dim == 2 ? (cube.index[1] << s) + dy : 0};
      cell_idx.push_back(k);
      const DyadicCube cell(f.dim, f.level, k);
      for (int b = 0; b < nb; ++b)
        basis_avg[b].push_back(monomial_integral_on_cell(cell, cube, alphas[b]) / hvol);
    }

  // Gram and rhs in the cell-L^2 inner product.
  std::vector<std::vector<double>> A(nb, std::vector<double>(nb, 0.0));
  std::vector<double> rhs(nb, 0.0);
  for (std::size_t c = 0; c < cell_idx.size(); ++c) {
    const double fv = f.at_cell(cell_idx[c]);
    for (int i = 0; i < nb; ++i) {
      rhs[i] += fv * basis_avg[i][c] * hvol;
      for (int j = i; j < nb; ++j) A[i][j] += basis_avg[i][c] * basis_avg[j][c] * hvol;
    }
  }
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < i; ++j) A[i][j] = A[j][i];

  // Symmetric elimination with diagonal pivoting; tiny pivots drop the
  // dependent direction instead of failing.
  double diag_scale = 0.0;
  for (int i = 0; i < nb; ++i) diag_scale = std::fmax(diag_scale, A[i][i]);
  std::vector<double> coeff(nb, 0.0);
  std::vector<int> order;
  std::vector<bool> used(nb, false);
  for (int step = 0; step < nb; ++step) {
    int piv = -1;
    double best = pivot_tol * diag_scale;
    for (int i = 0; i < nb; ++i)
      if (!used[i] && A[i][i] > best) {
        best = A[i][i];
        piv = i;
      }
    if (piv < 0) break;
    used[piv] = true;
    order.push_back(piv);
    for (int i = 0; i < nb; ++i) {
      if (used[i]) continue;
      const double m = A[i][piv] / A[piv][piv];
      for (int j = 0; j < nb; ++j) A[i][j] -= m * A[piv][j];
      rhs[i] -= m * rhs[piv];
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int i = *it;
    double acc = rhs[i];
    for (int j = 0; j < nb; ++j)
      if (j != i) acc -= A[i][j] * coeff[j];
    coeff[i] = acc / A[i][i];
  }

  StepFunction out(f.dim, f.level);
  for (std::size_t c = 0; c < cell_idx.size(); ++c) {
    double v = 0.0;
    for (int b = 0; b < nb; ++b) v += coeff[b] * basis_avg[b][c];
    out.set(cell_idx[c], v);
  }
  return out;
}

}  // namespace mllab
