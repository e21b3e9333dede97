#pragma once

#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/scalar_field.hpp"
#include "asdnk/spinor/forms.hpp"

namespace asdnk {

// Differential form with ScalarField coordinate components, stored by
// increasing index tuples.
class FormField {
 public:
  FormField() : FormField(0, {}) {}
  FormField(int degree, std::vector<std::string> chart) : degree_(degree), chart_(std::move(chart)) {
    const int n = static_cast<int>(chart_.size());
    if (degree < 0 || degree > n) throw Error("form degree out of range for chart");
    comps_.assign(static_cast<std::size_t>(binomial(n, degree)), ScalarField::constant(0.0, chart_));
  }

  static FormField scalar(const ScalarField& f) {
    FormField r(0, f.chart());
    r.comps_[0] = f;
    return r;
  }
  static FormField one_form(const std::vector<ScalarField>& c) {
    if (c.empty()) throw Error("empty one-form");
    FormField r(1, c.front().chart());
    if (c.size() != r.comps_.size()) throw Error("one-form needs one component per coordinate");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].chart() != r.chart_ && !c[i].is_constant()) throw Error("one-form components on different charts");
      r.comps_[i] = c[i].chart() == r.chart_ ? c[i] : c[i].rechart(r.chart_);
    }
    return r;
  }
  // d(coord)
  static FormField differential(const std::string& coord, const std::vector<std::string>& chart) {
    FormField r(1, chart);
    r.set({ScalarField::constant(0, chart).axis(coord)}, ScalarField::constant(1.0, chart));
    return r;
  }

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(chart_.size()); }
  const std::vector<std::string>& chart() const { return chart_; }
  const std::vector<ScalarField>& components() const { return comps_; }

  ScalarField get(std::vector<int> idx) const {
    int s = sort_with_sign(idx);
    if (s == 0) return ScalarField::constant(0.0, chart_);
    const ScalarField& c = comps_[static_cast<std::size_t>(combination_rank(dim(), idx))];
    return s > 0 ? c : -c;
  }
  ScalarField operator()(std::initializer_list<int> idx) const { return get(std::vector<int>(idx)); }

  void set(std::vector<int> idx, const ScalarField& v) {
    int s = sort_with_sign(idx);
    if (s == 0) throw Error("repeated index in form component");
    ScalarField c = v.chart() == chart_ ? v : v.rechart(chart_);
    comps_[static_cast<std::size_t>(combination_rank(dim(), idx))] = s > 0 ? c : -c;
  }

  FormValue evaluate(const double* p) const {
    FormValue v(degree_, dim());
    for (std::size_t i = 0; i < comps_.size(); ++i)
      v.comps[i] = comps_[i].is_zero() ? 0.0 : comps_[i].evaluate(p);
    return v;
  }
  FormValue evaluate(const std::vector<double>& p) const { return evaluate(p.data()); }

  friend FormField operator+(const FormField& a, const FormField& b) {
    check_same(a, b);
    FormField r = a;
    for (std::size_t i = 0; i < r.comps_.size(); ++i) {
      if (b.comps_[i].is_zero()) continue;
      r.comps_[i] = a.comps_[i].is_zero() ? b.comps_[i] : a.comps_[i] + b.comps_[i];
    }
    return r;
  }
  friend FormField operator-(const FormField& a, const FormField& b) { return a + (-1.0) * b; }
  friend FormField operator*(const ScalarField& f, const FormField& a) {
    FormField r = a;
    for (auto& c : r.comps_)
      if (!c.is_zero()) c = f * c;
    return r;
  }
  friend FormField operator*(double s, const FormField& a) {
    FormField r = a;
    for (auto& c : r.comps_)
      if (!c.is_zero()) c = c * s;
    return r;
  }

 private:
  static void check_same(const FormField& a, const FormField& b) {
    if (a.degree_ != b.degree_ || a.chart_ != b.chart_) throw Error("form degree/chart mismatch");
  }

  int degree_;
  std::vector<std::string> chart_;
  std::vector<ScalarField> comps_;
};

inline FormField wedge(const FormField& a, const FormField& b) {
  if (a.chart() != b.chart()) throw Error("wedge of forms on different charts");
  if (a.degree() + b.degree() > a.dim()) throw Error("wedge degree overflow");
  const int n = a.dim();
  FormField r(a.degree() + b.degree(), a.chart());
  auto ca = combinations(n, a.degree()), cb = combinations(n, b.degree());
  std::vector<ScalarField> acc(static_cast<std::size_t>(binomial(n, r.degree())), ScalarField::constant(0, a.chart()));
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const ScalarField& fa = a.components()[i];
    if (fa.is_zero()) continue;
    for (std::size_t j = 0; j < cb.size(); ++j) {
      const ScalarField& fb = b.components()[j];
      if (fb.is_zero()) continue;
      std::vector<int> idx = ca[i];
      idx.insert(idx.end(), cb[j].begin(), cb[j].end());
      int s = sort_with_sign(idx);
      if (s == 0) continue;
      auto& slot = acc[static_cast<std::size_t>(combination_rank(n, idx))];
      ScalarField term = s > 0 ? fa * fb : -(fa * fb);
      slot = slot.is_zero() ? term : slot + term;
    }
  }
  auto cr = combinations(n, r.degree());
  for (std::size_t k = 0; k < cr.size(); ++k) r.set(cr[k], acc[k]);
  return r;
}

// (dw)_J = sum_k (-1)^k d_{j_k} w_{J minus j_k}
inline FormField exterior_derivative(const FormField& w) {
  const int n = w.dim();
  if (w.degree() + 1 > n) return FormField(n, w.chart());  // top form: d w = 0 in a lower degree sense
  FormField r(w.degree() + 1, w.chart());
  for (const auto& J : combinations(n, w.degree() + 1)) {
    ScalarField sum = ScalarField::constant(0, w.chart());
    for (std::size_t k = 0; k < J.size(); ++k) {
      std::vector<int> rest;
      for (std::size_t m = 0; m < J.size(); ++m)
        if (m != k) rest.push_back(J[m]);
      ScalarField c = w.get(rest);
      if (c.is_zero()) continue;
      ScalarField dc = c.differentiate(MultiIndex::unit(J[k]));
      if (dc.is_zero()) continue;
      ScalarField term = k % 2 ? -dc : dc;
      sum = sum.is_zero() ? term : sum + term;
    }
    r.set(J, sum);
  }
  return r;
}

}  // namespace asdnk
