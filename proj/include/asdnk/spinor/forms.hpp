#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/linalg.hpp"
#include "asdnk/spinor/spinor.hpp"

namespace asdnk {

// Increasing index tuples of length p from {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> combinations(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) c[static_cast<std::size_t>(i)] = i;
  if (p > n) return out;
  for (;;) {
    out.push_back(c);
    int i = p - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - p + i) --i;
    if (i < 0) return out;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Sorts idx in place and returns the permutation sign, or 0 on a repeat.
inline int sort_with_sign(std::vector<int>& idx) {
  int inversions = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) ++inversions;
    }
  std::sort(idx.begin(), idx.end());
  return inversions % 2 ? -1 : 1;
}

inline int combination_rank(int n, const std::vector<int>& sorted) {
  auto all = combinations(n, static_cast<int>(sorted.size()));
  auto it = std::find(all.begin(), all.end(), sorted);
  if (it == all.end()) throw Error("bad form index");
  return static_cast<int>(it - all.begin());
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// p-form at a point, stored by increasing index tuples, so antisymmetry is
// exact by construction.
struct FormValue {
  int degree = 0;
  int dim = 4;
  std::vector<double> comps;

  FormValue() : comps(1, 0.0) {}
  FormValue(int p, int n) : degree(p), dim(n), comps(static_cast<std::size_t>(binomial(n, p)), 0.0) {
    if (p < 0 || p > n) throw Error("form degree out of range");
  }

  double get(std::vector<int> idx) const {
    if (static_cast<int>(idx.size()) != degree) throw Error("wrong number of form indices");
    int s = sort_with_sign(idx);
    if (s == 0) return 0.0;
    return s * comps[static_cast<std::size_t>(combination_rank(dim, idx))];
  }
  double operator()(std::initializer_list<int> idx) const { return get(std::vector<int>(idx)); }

  // Sets the component for idx (any order); the antisymmetric partners follow.
  void set(std::vector<int> idx, double v) {
    int s = sort_with_sign(idx);
    if (s == 0) {
      if (v != 0.0) throw Error("repeated index on a nonzero form component");
      return;
    }
    comps[static_cast<std::size_t>(combination_rank(dim, idx))] = s * v;
  }

  double max_abs() const {
    double m = 0.0;
    for (double c : comps) m = std::max(m, std::abs(c));
    return m;
  }

  friend FormValue operator+(FormValue a, const FormValue& b) {
    check_same(a, b);
    for (std::size_t i = 0; i < a.comps.size(); ++i) a.comps[i] += b.comps[i];
    return a;
  }
  friend FormValue operator-(FormValue a, const FormValue& b) {
    check_same(a, b);
    for (std::size_t i = 0; i < a.comps.size(); ++i) a.comps[i] -= b.comps[i];
    return a;
  }
  friend FormValue operator*(double c, FormValue a) {
    for (auto& v : a.comps) v *= c;
    return a;
  }

  static void check_same(const FormValue& a, const FormValue& b) {
    if (a.degree != b.degree || a.dim != b.dim) throw Error("form degree/dimension mismatch");
  }
};

using TwoFormValue = FormValue;

inline FormValue one_form_value(const std::vector<double>& c) {
  FormValue f(1, static_cast<int>(c.size()));
  f.comps = c;
  return f;
}

inline FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.dim != b.dim) throw Error("wedge of forms of different dimension");
  if (a.degree + b.degree > a.dim) throw Error("wedge degree overflow");
  FormValue r(a.degree + b.degree, a.dim);
  auto ca = combinations(a.dim, a.degree), cb = combinations(b.dim, b.degree);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (a.comps[i] == 0.0) continue;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (b.comps[j] == 0.0) continue;
      std::vector<int> idx = ca[i];
      idx.insert(idx.end(), cb[j].begin(), cb[j].end());
      int s = sort_with_sign(idx);
      if (s == 0) continue;
      r.comps[static_cast<std::size_t>(combination_rank(a.dim, idx))] += s * a.comps[i] * b.comps[j];
    }
  }
  return r;
}

// (*w)_J = (1/p!) w^I eps_{IJ} with eps_{0..n-1} = orientation * sqrt|det g|.
inline FormValue hodge_star(const FormValue& w, const DynMatrix& g, int orientation) {
  if (g.n != w.dim) throw Error("metric and form dimension differ");
  if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
  const int n = w.dim, p = w.degree;
  DynMatrix ginv = g.inverse();
  const double vol = orientation * std::sqrt(std::abs(g.determinant()));
  auto cp = combinations(n, p), cq = combinations(n, n - p);
  // raise all indices: w^I = sum_K det(ginv[I, K]) w_K
  std::vector<double> up(cp.size(), 0.0);
  for (std::size_t i = 0; i < cp.size(); ++i)
    for (std::size_t k = 0; k < cp.size(); ++k) {
      if (w.comps[k] == 0.0) continue;
      DynMatrix sub(p);
      for (int r = 0; r < p; ++r)
        for (int c = 0; c < p; ++c) sub(r, c) = ginv(cp[i][static_cast<std::size_t>(r)], cp[k][static_cast<std::size_t>(c)]);
      up[i] += (p == 0 ? 1.0 : sub.determinant()) * w.comps[k];
    }
  FormValue r(n - p, n);
  for (std::size_t j = 0; j < cq.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < cp.size(); ++i) {
      std::vector<int> idx = cp[i];
      idx.insert(idx.end(), cq[j].begin(), cq[j].end());
      int sg = sort_with_sign(idx);
      if (sg != 0) s += sg * up[i];
    }
    r.comps[j] = vol * s;
  }
  return r;
}

// Orientation sign of a top-degree form relative to the chart ordering.
inline int orientation_of(const FormValue& volume) {
  if (volume.degree != volume.dim) throw Error("orientation needs a top-degree form");
  if (volume.comps[0] == 0.0) throw DegenerateError("zero volume form");
  return volume.comps[0] > 0 ? 1 : -1;
}

struct Split {
  FormValue sd, asd;
};

inline Split sd_asd_split(const FormValue& w, const DynMatrix& g, int orientation) {
  if (w.degree != 2 || w.dim != 4) throw Error("SD/ASD split needs a two-form in four dimensions");
  FormValue star = hodge_star(w, g, orientation);
  return {0.5 * (w + star), 0.5 * (w - star)};
}

inline Split sd_asd_split(const FormValue& w, const DynMatrix& g, const FormValue& volume) {
  return sd_asd_split(w, g, orientation_of(volume));
}

// Coframe at a point: row a = frame index (AA'), column = coordinate.
using CoframeValue = Mat<double, 4>;

inline FormValue frame_one_form(const CoframeValue& e, int a) {
  FormValue f(1, 4);
  for (int m = 0; m < 4; ++m) f.comps[static_cast<std::size_t>(m)] = e[a][m];
  return f;
}

// g = 2(e^{00'} e^{11'} - e^{10'} e^{01'}) with symmetrised products.
inline DynMatrix metric_from_coframe_value(const CoframeValue& e) {
  DynMatrix g(4);
  const int e00 = frame_index(0, 0), e01 = frame_index(0, 1), e10 = frame_index(1, 0), e11 = frame_index(1, 1);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      g(m, n) = e[e00][m] * e[e11][n] + e[e11][m] * e[e00][n] - e[e10][m] * e[e01][n] - e[e01][m] * e[e10][n];
  return g;
}

// Sign of nu = e^{01'} ^ e^{10'} ^ e^{11'} ^ e^{00'} in chart orientation.
inline int coframe_orientation(const CoframeValue& e) {
  Mat<double, 4> m{};
  const int order[4] = {frame_index(0, 1), frame_index(1, 0), frame_index(1, 1), frame_index(0, 0)};
  for (int r = 0; r < 4; ++r) m[r] = e[order[r]];
  double det = determinant<4>(m);
  if (std::abs(det) <= 1e-10) throw DegenerateError("degenerate coframe (|det| <= 1e-10)");
  return det > 0 ? 1 : -1;
}

// Sigma^{A'B'} = 1/2 eps_{AB} e^{AA'}^e^{BB'},  Sigma^{AB} = 1/2 eps_{A'B'} e^{AA'}^e^{BB'};
// index 0, 1, 2 = (00), (01), (11).
struct SigmaBasis {
  std::array<FormValue, 3> primed;
  std::array<FormValue, 3> unprimed;
};

inline SigmaBasis sigma_basis(const CoframeValue& e) {
  coframe_orientation(e);  // rejects degenerate input
  std::array<FormValue, 4> f;
  for (int a = 0; a < 4; ++a) f[static_cast<std::size_t>(a)] = frame_one_form(e, a);
  auto E = [&](int A, int Ap) -> const FormValue& { return f[static_cast<std::size_t>(frame_index(A, Ap))]; };
  SigmaBasis s;
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int k = 0; k < 3; ++k) {
    int P = pairs[k][0], Q = pairs[k][1];
    FormValue sp(2, 4), su(2, 4);
    for (int A = 0; A < 2; ++A)
      for (int B = 0; B < 2; ++B) {
        if (Epsilon::lower[A][B] == 0.0) continue;
        sp = sp + (0.5 * Epsilon::lower[A][B]) * wedge(E(A, P), E(B, Q));
        su = su + (0.5 * Epsilon::lower[A][B]) * wedge(E(P, A), E(Q, B));
      }
    s.primed[static_cast<std::size_t>(k)] = sp;
    s.unprimed[static_cast<std::size_t>(k)] = su;
  }
  return s;
}

// Sigma component for an arbitrary (possibly unsymmetrised) index pair.
inline const FormValue& sigma(const std::array<FormValue, 3>& basis, int A, int B) {
  return basis[static_cast<std::size_t>(pair_index(A, B))];
}

}  // namespace asdnk
