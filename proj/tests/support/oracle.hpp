#pragma once

// Direct-formula reference implementations on nested vectors. Nothing here
// touches Eigen or the library's kernels.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mf/matcore.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid zeros(std::size_t r, std::size_t c) { return Grid(r, std::vector<double>(c, 0.0)); }

inline Grid eye(std::size_t n) {
  Grid g = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) g[i][i] = 1.0;
  return g;
}

inline Grid from(const mf::Matrix& m) {
  Grid g = zeros(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

inline mf::Matrix to(const Grid& g) {
  const auto r = static_cast<Eigen::Index>(g.size());
  const auto c = static_cast<Eigen::Index>(g.empty() ? 0 : g[0].size());
  mf::Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g[i][j];
  return m;
}

inline Grid mul(const Grid& a, const Grid& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Grid out = zeros(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += a[i][l] * b[l][j];
      out[i][j] = s;
    }
  return out;
}

inline Grid tr(const Grid& a) {
  Grid out = zeros(a.empty() ? 0 : a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
  return out;
}

inline Grid axpy(const Grid& a, double s, const Grid& b) {
  Grid out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] += s * b[i][j];
  return out;
}

inline double fro(const Grid& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

inline double max_abs_diff(const Grid& a, const Grid& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

/// Closed-form inverse of a 2x2 matrix.
inline Grid inv2(const Grid& g) {
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  if (det == 0.0) throw std::domain_error("singular 2x2");
  return {{g[1][1] / det, -g[0][1] / det}, {-g[1][0] / det, g[0][0] / det}};
}

/// Gauss-Jordan inverse with partial pivoting.
inline Grid inverse(Grid a) {
  const std::size_t n = a.size();
  Grid inv = eye(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
    if (a[p][c] == 0.0) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline Grid small_inverse(const Grid& g) { return g.size() == 2 ? inv2(g) : inverse(g); }

// X - eta (X X^T - A) X (X^T X)^{-1}
inline Grid scaledgd_sym(const Grid& x, const Grid& a, double eta) {
  const Grid res = axpy(mul(x, tr(x)), -1.0, a);
  return axpy(x, -eta, mul(mul(res, x), small_inverse(mul(tr(x), x))));
}

// X - eta (X X^T - A) X
inline Grid gd_sym(const Grid& x, const Grid& a, double eta) {
  const Grid res = axpy(mul(x, tr(x)), -1.0, a);
  return axpy(x, -eta, mul(res, x));
}

// X - eta (X X^T - A) X (X^T X + lambda I)^{-1}
inline Grid scaledgd_lambda(const Grid& x, const Grid& a, double eta, double lambda) {
  const Grid res = axpy(mul(x, tr(x)), -1.0, a);
  Grid g = mul(tr(x), x);
  for (std::size_t i = 0; i < g.size(); ++i) g[i][i] += lambda;
  return axpy(x, -eta, mul(mul(res, x), small_inverse(g)));
}

// Modified asymmetric ScaledGD: X frozen at t = 0, Jacobi-style afterwards.
inline std::pair<Grid, Grid> scaledgd_asym(const Grid& x, const Grid& y, const Grid& a, double eta, int t) {
  const Grid res = axpy(mul(x, tr(y)), -1.0, a);
  const Grid ny = axpy(y, -eta, mul(mul(tr(res), x), small_inverse(mul(tr(x), x))));
  const Grid nx = t == 0 ? x : axpy(x, -eta, mul(mul(res, y), small_inverse(mul(tr(y), y))));
  return {nx, ny};
}

}  // namespace oracle
