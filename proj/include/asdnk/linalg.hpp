#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "asdnk/error.hpp"

namespace asdnk {

template <class T, int N>
using Mat = std::array<std::array<T, N>, N>;

template <class T, int N>
using Vec = std::array<T, N>;

inline double magnitude(double v) { return std::abs(v); }
inline bool exactly_zero(double v) { return v == 0.0; }

template <class T, int N>
Mat<T, N> zero_matrix() {
  Mat<T, N> m{};
  for (auto& row : m) row.fill(T(0.0));
  return m;
}

// Solves a (row-major, n x n) with partial pivoting on magnitude(). The
// scalar type only needs field operations, so dual numbers pass through and
// the solution carries derivatives.
template <class T>
std::vector<T> solve_dense(std::vector<T> a, std::vector<T> b, std::size_t n,
                           double rel_tol = 1e-13) {
  double scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, magnitude(v));
  if (scale == 0.0) throw DegenerateError("singular linear system (zero matrix)");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = magnitude(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double m = magnitude(a[r * n + col]);
      if (m > best) {
        best = m;
        piv = r;
      }
    }
    if (best <= rel_tol * scale) throw DegenerateError("singular linear system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const T inv = T(1.0) / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const T f = a[r * n + col] * inv;
      if (exactly_zero(f)) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] = a[r * n + c] - f * a[col * n + c];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<T> x(n, T(0.0));
  for (std::size_t i = n; i-- > 0;) {
    T s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s = s - a[i * n + c] * x[c];
    x[i] = s / a[i * n + i];
  }
  return x;
}

template <int N>
double determinant(const Mat<double, N>& m) {
  Mat<double, N> a = m;
  double det = 1.0;
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < N; ++r) {
      double f = a[r][col] / a[col][col];
      for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

template <int N>
Mat<double, N> inverse(const Mat<double, N>& m) {
  std::vector<double> a(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a[i * N + j] = m[i][j];
  Mat<double, N> out{};
  for (int c = 0; c < N; ++c) {
    std::vector<double> e(N, 0.0);
    e[c] = 1.0;
    auto x = solve_dense(a, e, N, 1e-14);
    for (int r = 0; r < N; ++r) out[r][c] = x[r];
  }
  return out;
}

template <int N>
Mat<double, N> multiply(const Mat<double, N>& a, const Mat<double, N>& b) {
  Mat<double, N> c{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

template <int N>
struct EigenSystem {
  Vec<double, N> values{};
  Mat<double, N> vectors{};  // column j is the eigenvector of values[j]
};

// Cyclic Jacobi rotations; fine for the 3x3 and 4x4 metrics used here.
template <int N>
EigenSystem<N> symmetric_eigen(const Mat<double, N>& m) {
  Mat<double, N> a = m;
  Mat<double, N> v{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) v[i][j] = i == j ? 1.0 : 0.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < N; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < N; ++k) {
          double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  EigenSystem<N> out;
  std::array<int, N> order{};
  for (int i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });
  for (int j = 0; j < N; ++j) {
    out.values[j] = a[order[j]][order[j]];
    for (int i = 0; i < N; ++i) out.vectors[i][j] = v[i][order[j]];
  }
  return out;
}

// Counts of (positive, negative) eigenvalues; zero eigenvalues relative to
// the spectral radius count as degenerate.
template <int N>
std::pair<int, int> signature(const Mat<double, N>& m, double rel_tol = 1e-12) {
  auto es = symmetric_eigen<N>(m);
  double radius = 0.0;
  for (double v : es.values) radius = std::max(radius, std::abs(v));
  int pos = 0, neg = 0;
  for (double v : es.values) {
    if (v > rel_tol * radius) ++pos;
    else if (v < -rel_tol * radius) ++neg;
  }
  return {pos, neg};
}

}  // namespace asdnk

namespace asdnk {

// Square matrix of runtime size; used where the dimension (3 or 4) is a
// property of the data rather than the type.
struct DynMatrix {
  int n = 0;
  std::vector<double> a;

  DynMatrix() = default;
  explicit DynMatrix(int size) : n(size), a(static_cast<std::size_t>(size * size), 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  double determinant() const {
    std::vector<double> m = a;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
      if (m[piv * n + c] == 0.0) return 0.0;
      if (piv != c) {
        for (int k = 0; k < n; ++k) std::swap(m[piv * n + k], m[c * n + k]);
        det = -det;
      }
      det *= m[c * n + c];
      for (int r = c + 1; r < n; ++r) {
        double f = m[r * n + c] / m[c * n + c];
        for (int k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
      }
    }
    return det;
  }

  double max_abs() const {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
  }

  // Throws DegenerateError when |det| is negligible relative to the entries.
  DynMatrix inverse() const {
    double scale = max_abs();
    double det = determinant();
    if (scale == 0.0 || std::abs(det) <= 1e-13 * std::pow(scale, n))
      throw DegenerateError("degenerate matrix (det = " + std::to_string(det) + ")");
    DynMatrix out(n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> e(static_cast<std::size_t>(n), 0.0);
      e[static_cast<std::size_t>(c)] = 1.0;
      auto x = solve_dense(a, e, static_cast<std::size_t>(n), 1e-15);
      for (int r = 0; r < n; ++r) out(r, c) = x[static_cast<std::size_t>(r)];
    }
    return out;
  }
};

}  // namespace asdnk
