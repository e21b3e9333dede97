#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/scalar_field.hpp"
#include "asdnk/geometry/form_field.hpp"
#include "asdnk/linalg.hpp"
#include "asdnk/spinor/forms.hpp"
#include "asdnk/spinor/spinor.hpp"

namespace asdnk {

namespace detail {

// |f|^e, kept differentiable for closed forms via (f^2)^(e/2).
inline ScalarField pow_abs(const ScalarField& f, double e) {
  if (f.backend() == Backend::ClosedForm)
    return ScalarField::closed_form(pow(f.expr() * f.expr(), Expr(e / 2.0)), f.chart(), f.domain());
  std::vector<double> v = f.node_values();
  for (auto& x : v) x = std::pow(std::abs(x), e);
  return ScalarField::sampled(f.grid(), std::move(v)).with_domain(f.domain());
}

// Determinant of the submatrix g[rows, cols] by Laplace expansion.
template <class Get>
ScalarField minor_det(const Get& g, const std::vector<int>& rows, const std::vector<int>& cols,
                      const std::vector<std::string>& chart) {
  const std::size_t k = rows.size();
  if (k == 0) return ScalarField::constant(1.0, chart);
  if (k == 1) return g(rows[0], cols[0]);
  ScalarField acc = ScalarField::constant(0.0, chart);
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < k; ++c) {
    const ScalarField& a = g(rows[0], cols[c]);
    if (a.is_zero()) continue;
    std::vector<int> sub_cols;
    for (std::size_t j = 0; j < k; ++j)
      if (j != c) sub_cols.push_back(cols[j]);
    ScalarField m = minor_det(g, sub_rows, sub_cols, chart);
    if (m.is_zero()) continue;
    ScalarField term = a * m;
    acc = acc.is_zero() ? (c % 2 ? -term : term) : (c % 2 ? acc - term : acc + term);
  }
  return acc;
}

inline std::vector<int> complement(const std::vector<int>& idx, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) out.push_back(i);
  return out;
}

inline int index_sum(const std::vector<int>& idx) {
  int s = 0;
  for (int i : idx) s += i;
  return s;
}

}  // namespace detail

// Metric value with first and second coordinate derivatives at a point.
struct MetricJet {
  int n = 0;
  DynMatrix g;
  std::vector<double> dg;   // [m][i][j] = d_m g_ij
  std::vector<double> ddg;  // [m][k][i][j] = d_m d_k g_ij

  double d(int m, int i, int j) const { return dg[static_cast<std::size_t>((m * n + i) * n + j)]; }
  double dd(int m, int k, int i, int j) const {
    return ddg[static_cast<std::size_t>(((m * n + k) * n + i) * n + j)];
  }
};

class MetricField {
 public:
  // upper: row-major upper triangle g_00, g_01, .., g_0n, g_11, ...
  MetricField(std::vector<std::string> chart, const std::vector<ScalarField>& upper, int orientation)
      : chart_(std::move(chart)), orientation_(orientation), cache_(std::make_shared<Cache>()) {
    const int n = dim();
    if (n < 2 || n > 4) throw Error("metric dimension must be 2..4");
    if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
    if (upper.size() != static_cast<std::size_t>(n * (n + 1) / 2)) throw Error("metric needs n(n+1)/2 components");
    comps_.resize(static_cast<std::size_t>(n * n), ScalarField::constant(0.0, chart_));
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j, ++k) {
        ScalarField c = upper[k].chart() == chart_ ? upper[k] : upper[k].rechart(chart_);
        comps_[static_cast<std::size_t>(i * n + j)] = c;
        comps_[static_cast<std::size_t>(j * n + i)] = c;
      }
  }

  int dim() const { return static_cast<int>(chart_.size()); }
  const std::vector<std::string>& chart() const { return chart_; }
  int orientation() const { return orientation_; }
  const ScalarField& component(int i, int j) const { return comps_[static_cast<std::size_t>(i * dim() + j)]; }
  const ScalarField& operator()(int i, int j) const { return component(i, j); }

  MetricField with_orientation(int s) const {
    MetricField m = *this;
    if (s != 1 && s != -1) throw Error("orientation must be +1 or -1");
    m.orientation_ = s;
    return m;
  }

  Domain domain() const {
    Domain d;
    for (const auto& c : comps_) d = d.merged(c.domain());
    return d;
  }

  DynMatrix value(const double* p) const {
    const int n = dim();
    DynMatrix g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = eval(component(i, j), p);
    return g;
  }
  DynMatrix value(const std::vector<double>& p) const { return value(checked(p)); }

  MetricJet jet(const double* p, int order = 2) const {
    const int n = dim();
    const Cache& c = derivatives();
    MetricJet j;
    j.n = n;
    j.g = value(p);
    j.dg.assign(static_cast<std::size_t>(n * n * n), 0.0);
    for (int m = 0; m < n; ++m)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          double v = eval(c.first[static_cast<std::size_t>((m * n + a) * n + b)], p);
          j.dg[static_cast<std::size_t>((m * n + a) * n + b)] = v;
          j.dg[static_cast<std::size_t>((m * n + b) * n + a)] = v;
        }
    if (order < 2) return j;
    j.ddg.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
    for (int m = 0; m < n; ++m)
      for (int k = m; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) {
            double v = eval(c.second[static_cast<std::size_t>(((m * n + k) * n + a) * n + b)], p);
            for (auto [mm, kk] : {std::pair{m, k}, std::pair{k, m}})
              for (auto [aa, bb] : {std::pair{a, b}, std::pair{b, a}})
                j.ddg[static_cast<std::size_t>(((mm * n + kk) * n + aa) * n + bb)] = v;
          }
    return j;
  }
  MetricJet jet(const std::vector<double>& p, int order = 2) const { return jet(checked(p), order); }

  ScalarField determinant() const {
    std::vector<int> all(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i) all[static_cast<std::size_t>(i)] = i;
    return detail::minor_det([this](int i, int j) -> const ScalarField& { return component(i, j); }, all, all,
                             chart_);
  }

 private:
  struct Cache {
    std::once_flag once;
    std::vector<ScalarField> first, second;
  };

  static double eval(const ScalarField& f, const double* p) { return f.is_zero() ? 0.0 : f.evaluate(p); }

  const double* checked(const std::vector<double>& p) const {
    if (p.size() != chart_.size()) throw Error("point has wrong dimension");
    return p.data();
  }

  // Derivative fields are built on first use and shared between copies.
  const Cache& derivatives() const {
    std::call_once(cache_->once, [this] {
      const int n = dim();
      Cache& c = *cache_;
      c.first.assign(static_cast<std::size_t>(n * n * n), ScalarField::constant(0.0, chart_));
      c.second.assign(static_cast<std::size_t>(n * n * n * n), ScalarField::constant(0.0, chart_));
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          const ScalarField& g = component(a, b);
          if (g.is_constant()) continue;
          for (int m = 0; m < n; ++m) {
            ScalarField dm = g.differentiate(MultiIndex::unit(m));
            c.first[static_cast<std::size_t>((m * n + a) * n + b)] = dm;
            for (int k = m; k < n; ++k) {
              MultiIndex mk = MultiIndex::unit(m) + MultiIndex::unit(k);
              c.second[static_cast<std::size_t>(((m * n + k) * n + a) * n + b)] =
                  dm.is_zero() ? dm : g.differentiate(mk);
            }
          }
        }
    });
    return *cache_;
  }

  std::vector<std::string> chart_;
  int orientation_;
  std::vector<ScalarField> comps_;
  std::shared_ptr<Cache> cache_;
};

// Coframe value with coordinate derivatives: de[a][m][r] = d_r e^a_m.
struct CoframeJet {
  CoframeValue e{};
  std::array<Mat<double, 4>, 4> de{};
  std::array<std::array<Mat<double, 4>, 4>, 4> dde{};  // dde[a][m][r][s] = d_r d_s e^a_m
};

// Four one-form fields indexed by frame_index(A, A').
class CoFrame {
 public:
  CoFrame(std::array<FormField, 4> e, int orientation) : e_(std::move(e)), orientation_(orientation) {
    for (const auto& f : e_) {
      if (f.degree() != 1) throw Error("coframe elements must be one-forms");
      if (f.dim() != 4 || f.chart() != e_[0].chart()) throw Error("coframe needs four one-forms on one 4D chart");
    }
    if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
  }

  const FormField& e(int a) const { return e_[static_cast<std::size_t>(a)]; }
  const FormField& e(int A, int Ap) const { return e(frame_index(A, Ap)); }
  const std::vector<std::string>& chart() const { return e_[0].chart(); }
  int orientation() const { return orientation_; }

  CoframeValue value(const double* p) const {
    CoframeValue v{};
    for (int a = 0; a < 4; ++a)
      for (int m = 0; m < 4; ++m) {
        const ScalarField& c = e_[static_cast<std::size_t>(a)].components()[static_cast<std::size_t>(m)];
        v[a][m] = c.is_zero() ? 0.0 : c.evaluate(p);
      }
    return v;
  }
  CoframeValue value(const std::vector<double>& p) const { return value(p.data()); }

  CoframeJet jet(const double* p, int order = 2) const {
    CoframeJet j;
    j.e = value(p);
    for (int a = 0; a < 4; ++a)
      for (int m = 0; m < 4; ++m) {
        const ScalarField& c = e_[static_cast<std::size_t>(a)].components()[static_cast<std::size_t>(m)];
        if (c.is_constant()) continue;
        for (int r = 0; r < 4; ++r) {
          ScalarField dr = c.differentiate(MultiIndex::unit(r));
          if (dr.is_zero()) continue;
          j.de[a][m][r] = dr.evaluate(p);
          if (order < 2) continue;
          for (int s = r; s < 4; ++s) {
            ScalarField drs = dr.is_constant() ? ScalarField() : c.differentiate(MultiIndex::unit(r) + MultiIndex::unit(s));
            double v = drs.is_zero() ? 0.0 : drs.evaluate(p);
            j.dde[a][m][r][s] = j.dde[a][m][s][r] = v;
          }
        }
      }
    return j;
  }
  CoframeJet jet(const std::vector<double>& p, int order = 2) const { return jet(p.data(), order); }

  // Throws DegenerateError when the coframe degenerates at p.
  int orientation_at(const double* p) const { return coframe_orientation(value(p)); }

 private:
  std::array<FormField, 4> e_;
  int orientation_;
};

// g = 2(e^{00'} e^{11'} - e^{10'} e^{01'}), symmetrised.
inline MetricField metric_from_coframe(const CoFrame& cf) {
  const auto& ch = cf.chart();
  const FormField &e00 = cf.e(0, 0), &e01 = cf.e(0, 1), &e10 = cf.e(1, 0), &e11 = cf.e(1, 1);
  auto term = [](const FormField& a, const FormField& b, int m, int n) {
    const ScalarField &am = a.components()[static_cast<std::size_t>(m)], &bn = b.components()[static_cast<std::size_t>(n)];
    if (am.is_zero() || bn.is_zero()) return ScalarField::constant(0.0, am.chart());
    return am * bn;
  };
  std::vector<ScalarField> upper;
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n) {
      ScalarField s = term(e00, e11, m, n) + term(e11, e00, m, n) - term(e10, e01, m, n) - term(e01, e10, m, n);
      upper.push_back(s);
    }
  return MetricField(ch, upper, cf.orientation());
}

// Hodge star of a form field. Uses Jacobi's complementary-minor identity,
// so only minors of g (not of g^{-1}) appear:
// (*w)_J = s sgn(det g)|det g|^{-1/2} sgn(J^c, J)(-1)^{|J^c|} sum_K (-1)^{|K|} det g[K^c, J] w_K
// where |I| is the index sum.
inline FormField hodge_star(const FormField& w, const MetricField& g, int orientation) {
  if (w.chart() != g.chart()) throw Error("form and metric live on different charts");
  if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
  const int n = w.dim(), p = w.degree();
  auto get = [&g](int i, int j) -> const ScalarField& { return g.component(i, j); };
  ScalarField det = g.determinant();
  if (det.is_zero()) throw DegenerateError("metric determinant vanishes identically");
  ScalarField pref = det * detail::pow_abs(det, -1.5) * static_cast<double>(orientation);
  FormField r(n - p, w.chart());
  auto cp = combinations(n, p);
  for (const auto& J : combinations(n, n - p)) {
    std::vector<int> Jc = detail::complement(J, n);
    std::vector<int> order = Jc;
    order.insert(order.end(), J.begin(), J.end());
    int s = sort_with_sign(order) * (detail::index_sum(Jc) % 2 ? -1 : 1);
    ScalarField acc = ScalarField::constant(0.0, w.chart());
    for (std::size_t k = 0; k < cp.size(); ++k) {
      const ScalarField& wk = w.components()[k];
      if (wk.is_zero()) continue;
      ScalarField m = detail::minor_det(get, detail::complement(cp[k], n), J, w.chart());
      if (m.is_zero()) continue;
      ScalarField term = m * wk;
      bool neg = detail::index_sum(cp[k]) % 2;
      acc = acc.is_zero() ? (neg ? -term : term) : (neg ? acc - term : acc + term);
    }
    if (!acc.is_zero()) r.set(J, (pref * acc) * static_cast<double>(s));
  }
  return r;
}

// s sqrt|det g| dx^0 ^ ... ^ dx^{n-1}
inline FormField volume_form(const MetricField& g) {
  FormField v(g.dim(), g.chart());
  std::vector<int> all;
  for (int i = 0; i < g.dim(); ++i) all.push_back(i);
  v.set(all, detail::pow_abs(g.determinant(), 0.5) * static_cast<double>(g.orientation()));
  return v;
}

// (positive, negative) eigenvalue counts of g at p.
inline std::pair<int, int> signature_at(const MetricField& g, const double* p) {
  DynMatrix m = g.value(p);
  if (g.dim() == 4) {
    Mat<double, 4> a{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a[i][j] = m(i, j);
    return signature<4>(a);
  }
  if (g.dim() == 3) {
    Mat<double, 3> a{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
    return signature<3>(a);
  }
  throw Error("signature_at supports 3D and 4D metrics");
}

// A null tetrad at p with g = 2(e00 e11 - e10 e01) and the metric's
// orientation, built from the eigen-decomposition g = a^2 + b^2 - c^2 - d^2.
inline CoframeValue null_tetrad_at(const MetricField& g, const double* p) {
  if (g.dim() != 4) throw Error("null tetrad needs a 4D metric");
  DynMatrix m = g.value(p);
  Mat<double, 4> a{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m(i, j);
  auto es = symmetric_eigen<4>(a);
  if (!(es.values[1] > 0 && es.values[2] < 0)) throw DegenerateError("metric does not have signature (2,2)");
  std::array<std::array<double, 4>, 4> basis{};
  for (int k = 0; k < 4; ++k) {
    double s = std::sqrt(std::abs(es.values[k]));
    for (int i = 0; i < 4; ++i) basis[k][i] = s * es.vectors[i][k];
  }
  const double r = 1.0 / std::sqrt(2.0);
  CoframeValue e{};
  for (int i = 0; i < 4; ++i) {
    e[frame_index(0, 0)][i] = r * (basis[0][i] + basis[2][i]);
    e[frame_index(1, 1)][i] = r * (basis[0][i] - basis[2][i]);
    e[frame_index(1, 0)][i] = r * (basis[1][i] + basis[3][i]);
    e[frame_index(0, 1)][i] = -r * (basis[1][i] - basis[3][i]);
  }
  if (coframe_orientation(e) != g.orientation()) std::swap(e[frame_index(1, 0)], e[frame_index(0, 1)]);
  // swapping e10 and e01 keeps g and flips the orientation
  return e;
}

}  // namespace asdnk
