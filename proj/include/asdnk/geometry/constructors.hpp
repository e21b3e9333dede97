#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/geometry/metric.hpp"
#include "asdnk/sampling.hpp"

namespace asdnk {

inline const std::vector<std::string>& nk_chart() {
  static const std::vector<std::string> c{"w", "z", "x", "y"};
  return c;
}
inline const std::vector<std::string>& dkp_chart() {
  static const std::vector<std::string> c{"x", "y", "t", "z"};
  return c;
}
inline const std::vector<std::string>& ew_chart() {
  static const std::vector<std::string> c{"x", "y", "t"};
  return c;
}

namespace detail {

inline ScalarField on_chart(const ScalarField& f, const std::vector<std::string>& chart) {
  if (f.chart() == chart) return f;
  if (f.backend() != Backend::ClosedForm)
    throw Error("sampled field on chart of size " + std::to_string(f.chart().size()) +
                " cannot be lifted to a different chart");
  return f.rechart(chart);
}

inline FormField one_form_on(const std::vector<std::string>& chart,
                             std::initializer_list<std::pair<std::string, ScalarField>> parts) {
  std::vector<ScalarField> c(chart.size(), ScalarField::constant(0.0, chart));
  for (const auto& [name, v] : parts) {
    auto it = std::find(chart.begin(), chart.end(), name);
    if (it == chart.end()) throw Error("coordinate '" + name + "' not in chart");
    auto& slot = c[static_cast<std::size_t>(it - chart.begin())];
    ScalarField f = on_chart(v, chart);
    slot = slot.is_zero() ? f : slot + f;
  }
  return FormField::one_form(c);
}

// Sign of f over its domain; throws DomainError naming `what` if f
// vanishes or changes sign at one of 256 seeded Halton points.
inline int definite_sign(const ScalarField& f, const std::string& what) {
  Domain d = f.domain();
  for (const auto& c : f.chart())
    if (!d.interval(c)) d.bound(c, -1.0, 1.0);  // unbounded: check a unit box
  auto pts = sample_points(d, f.chart(), 256, 0x5eed);
  int sign = 0;
  double scale = 0.0;
  std::vector<double> vals;
  for (const auto& p : pts) {
    double v = f.evaluate(p);
    vals.push_back(v);
    scale = std::max(scale, std::abs(v));
  }
  for (double v : vals) {
    if (!(std::abs(v) > 1e-8 * std::max(scale, 1.0))) throw DomainError(what + " vanishes on the domain");
    int s = v > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) throw DomainError(what + " changes sign on the domain");
  }
  return sign;
}

inline int conformal_sign(const ScalarField& wx) { return definite_sign(wx, "W_x (conformal factor)"); }

inline ScalarField dkp_lift(const ScalarField& f) {
  if (f.chart() != ew_chart()) throw Error("H and W must live on chart (x, y, t)");
  return on_chart(f, dkp_chart());
}

}  // namespace detail

// e^{00'} = dw, e^{10'} = dz, e^{01'} = (Th_xx dz - Th_xy dw - dy)/2,
// e^{11'} = (dx - Th_yy dw + Th_xy dz)/2. Orientation +1 in the chart.
inline CoFrame nk_coframe(const ScalarField& theta) {
  const auto& ch = theta.chart();
  ScalarField txx = theta.d("x", 2), tyy = theta.d("y", 2), txy = theta.differentiate(MultiIndex::of(ch, {"x", "y"}));
  ScalarField one = ScalarField::constant(1.0, ch);
  std::array<FormField, 4> e;
  e[frame_index(0, 0)] = detail::one_form_on(ch, {{"w", one}});
  e[frame_index(1, 0)] = detail::one_form_on(ch, {{"z", one}});
  e[frame_index(0, 1)] = detail::one_form_on(ch, {{"w", txy * -0.5}, {"z", txx * 0.5}, {"y", one * -0.5}});
  e[frame_index(1, 1)] = detail::one_form_on(ch, {{"w", tyy * -0.5}, {"z", txy * 0.5}, {"x", one * 0.5}});
  return CoFrame(e, 1);
}

// g = dw dx + dz dy - Th_xx dz^2 - Th_yy dw^2 + 2 Th_xy dw dz
inline MetricField nk_metric(const ScalarField& theta) {
  const auto& ch = theta.chart();
  const int w = theta.axis("w"), z = theta.axis("z"), x = theta.axis("x"), y = theta.axis("y");
  const int n = static_cast<int>(ch.size());
  if (n != 4) throw Error("nk_metric needs a 4D chart containing w, z, x, y");
  std::vector<ScalarField> full(16, ScalarField::constant(0.0, ch));
  auto put = [&](int i, int j, const ScalarField& v) { full[static_cast<std::size_t>(i * 4 + j)] = full[static_cast<std::size_t>(j * 4 + i)] = v; };
  put(w, x, ScalarField::constant(0.5, ch));
  put(z, y, ScalarField::constant(0.5, ch));
  put(z, z, -theta.d("x", 2));
  put(w, w, -theta.d("y", 2));
  put(w, z, theta.differentiate(MultiIndex::of(ch, {"x", "y"})));
  std::vector<ScalarField> upper;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) upper.push_back(full[static_cast<std::size_t>(i * 4 + j)]);
  return MetricField(ch, upper, 1);
}

// g = V(dy^2 - 4 dx dt - 4 H_x dt^2) - V^{-1}(dz - V dy - 2 W_y dt)^2, V = W_x,
// on chart (x, y, t, z). H and W must be closed-form on (x, y, t).
inline MetricField dkp_metric(const ScalarField& h, const ScalarField& w) {
  int sign = detail::conformal_sign(w.d("x"));
  ScalarField v = detail::dkp_lift(w.d("x")), wy = detail::dkp_lift(w.d("y")), hx = detail::dkp_lift(h.d("x"));
  const auto& ch = dkp_chart();
  auto c = [&](double k) { return ScalarField::constant(k, ch); };
  // order: xx xy xt xz yy yt yz tt tz zz
  std::vector<ScalarField> upper{c(0), c(0), v * -2.0, c(0),
                                 c(0), wy * -2.0, c(1.0),
                                 v * hx * -4.0 - wy * wy * 4.0 / v, wy * 2.0 / v,
                                 -1.0 / v};
  return MetricField(ch, upper, -sign);
}

// e^{00'} = -2 W_x dt, e^{10'} = (dz - 2 W_y dt)/(2 W_x),
// e^{01'} = dz - 2 W_x dy - 2 W_y dt + z e^{00'}, e^{11'} = dx + H_x dt + z e^{10'}.
inline CoFrame dkp_coframe(const ScalarField& h, const ScalarField& w) {
  int sign = detail::conformal_sign(w.d("x"));
  ScalarField v = detail::dkp_lift(w.d("x")), wy = detail::dkp_lift(w.d("y")), hx = detail::dkp_lift(h.d("x"));
  const auto& ch = dkp_chart();
  ScalarField one = ScalarField::constant(1.0, ch);
  ScalarField z = ScalarField::closed_form(Expr::variable("z"), ch);
  std::array<FormField, 4> e;
  e[frame_index(0, 0)] = detail::one_form_on(ch, {{"t", v * -2.0}});
  e[frame_index(1, 0)] = detail::one_form_on(ch, {{"z", 0.5 / v}, {"t", -wy / v}});
  e[frame_index(0, 1)] = detail::one_form_on(ch, {{"z", one}, {"y", v * -2.0}, {"t", wy * -2.0 - z * v * 2.0}});
  e[frame_index(1, 1)] = detail::one_form_on(ch, {{"x", one}, {"t", hx - z * wy / v}, {"z", z * 0.5 / v}});
  return CoFrame(e, -sign);
}

}  // namespace asdnk
