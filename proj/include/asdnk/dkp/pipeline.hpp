#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "asdnk/curvature/checks.hpp"
#include "asdnk/curvature/riemann.hpp"
#include "asdnk/error.hpp"
#include "asdnk/geometry/constructors.hpp"
#include "asdnk/sampling.hpp"

namespace asdnk {

// H_yy - H_xt + H_x H_xx
inline ScalarField residual_heqn(const ScalarField& h) {
  const auto& ch = h.chart();
  return h.d("y", 2) - h.differentiate(MultiIndex::of(ch, {"x", "t"})) + h.d("x") * h.d("x", 2);
}

// W_yy - W_xt + (H_x W_x)_x
inline ScalarField residual_lindkp(const ScalarField& h, const ScalarField& w) {
  const auto& ch = w.chart();
  return w.d("y", 2) - w.differentiate(MultiIndex::of(ch, {"x", "t"})) + (h.d("x") * w.d("x")).d("x");
}

// Linearised solution generated by the point symmetries of the H equation:
// the scaling H -> H(lx, ly, lt)/l and the three translations.
//   W = a(x H_x + y H_y + t H_t - H) + b H_x + c H_t + e H_y
inline ScalarField symmetry_W(const ScalarField& h, double a, double b, double c, double e) {
  if (h.backend() != Backend::ClosedForm) throw Error("symmetry_W needs a closed-form H");
  const auto& ch = h.chart();
  ScalarField w = ScalarField::constant(0.0, ch, h.domain());
  auto add = [&](double k, const ScalarField& f) {
    if (k != 0.0) w = w.is_zero() ? k * f : w + k * f;
  };
  if (a != 0.0) {
    auto coord = [&](const char* v) { return ScalarField::closed_form(Expr::variable(v), ch, h.domain()); };
    add(a, coord("x") * h.d("x") + coord("y") * h.d("y") + coord("t") * h.d("t") - h);
  }
  add(b, h.d("x"));
  add(c, h.d("t"));
  add(e, h.d("y"));
  return w;
}

// Conformal metric h and one-form nu on a 3D chart.
struct EWStructure {
  MetricField h;
  FormField nu;
};

// h = dy^2 - 4 dx dt - 4u dt^2, nu = -4 u_x dt on (x, y, t).
inline EWStructure ew_from_u(const ScalarField& u) {
  if (u.chart() != ew_chart()) throw Error("u must live on chart (x, y, t)");
  const auto& ch = ew_chart();
  auto c = [&](double k) { return ScalarField::constant(k, ch, u.domain()); };
  // xx xy xt yy yt tt
  MetricField h(ch, {c(0), c(0), c(-2.0), c(1.0), c(0), u * -4.0}, 1);
  FormField nu = detail::one_form_on(ch, {{"t", u.d("x") * -4.0}});
  return {h, nu};
}

namespace detail {

inline double max_abs_over(const ScalarField& f, const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, std::abs(f.evaluate(p)));
  return m;
}

// Default sample points on the field's domain; unbounded coordinates
// fall back to [-1, 1].
inline std::vector<std::vector<double>> default_points(Domain d, const std::vector<std::string>& chart,
                                                       std::size_t n, std::uint64_t seed) {
  for (const auto& c : chart)
    if (!d.interval(c)) d.bound(c, -1.0, 1.0);
  return sample_points(d, chart, n, seed);
}

}  // namespace detail

// Weyl connection G = LC(h) - 1/2(delta^k_i nu_j + delta^k_j nu_i - h_ij nu^k),
// so that D h = nu (x) h. Returns the trace-free symmetrised Ricci at p.
inline DynMatrix ew_tracefree_ricci(const EWStructure& ew, const double* p) {
  const int n = ew.h.dim();
  MetricJet j = ew.h.jet(p, 2);
  DynMatrix gi = j.g.inverse();
  if (!std::isfinite(gi.max_abs())) throw DegenerateError("degenerate conformal metric");
  ConnectionJet c = levi_civita(j, gi);
  std::vector<double> nu(static_cast<std::size_t>(n)), dnu(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const ScalarField& ni = ew.nu.components()[static_cast<std::size_t>(i)];
    if (ni.is_zero()) continue;
    nu[static_cast<std::size_t>(i)] = ni.evaluate(p);
    for (int e = 0; e < n; ++e) dnu[static_cast<std::size_t>(e * n + i)] = ni.differentiate(MultiIndex::unit(e)).evaluate(p);
  }
  // nu^k = g^{km} nu_m and its derivatives
  std::vector<double> nup(static_cast<std::size_t>(n), 0.0), dnup(static_cast<std::size_t>(n * n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m) {
      nup[static_cast<std::size_t>(k)] += gi(k, m) * nu[static_cast<std::size_t>(m)];
      for (int e = 0; e < n; ++e) {
        double dgi = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) dgi -= gi(k, a) * j.d(e, a, b) * gi(b, m);
        dnup[static_cast<std::size_t>(e * n + k)] += dgi * nu[static_cast<std::size_t>(m)] + gi(k, m) * dnu[static_cast<std::size_t>(e * n + m)];
      }
    }
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        c.gamma[c.at3(k, a, b)] -= 0.5 * (delta(k, a) * nu[static_cast<std::size_t>(b)] + delta(k, b) * nu[static_cast<std::size_t>(a)] -
                                          j.g(a, b) * nup[static_cast<std::size_t>(k)]);
        for (int e = 0; e < n; ++e)
          c.dgamma[c.at4(e, k, a, b)] -=
              0.5 * (delta(k, a) * dnu[static_cast<std::size_t>(e * n + b)] + delta(k, b) * dnu[static_cast<std::size_t>(e * n + a)] -
                     j.d(e, a, b) * nup[static_cast<std::size_t>(k)] - j.g(a, b) * dnup[static_cast<std::size_t>(e * n + k)]);
      }
  DynMatrix ric = ricci_of(riemann_up(c), n);
  DynMatrix s(n);
  double trace = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      s(a, b) = 0.5 * (ric(a, b) + ric(b, a));
      trace += gi(a, b) * s(a, b);
    }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s(a, b) -= trace / n * j.g(a, b);
  return s;
}

inline double ew_residual(const EWStructure& ew, const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, ew_tracefree_ricci(ew, p.data()).max_abs());
  return m;
}

inline double ew_residual(const EWStructure& ew, std::size_t n = 100, std::uint64_t seed = 7) {
  return ew_residual(ew, detail::default_points(ew.h.domain(), ew.h.chart(), n, seed));
}

// Monopole (V, alpha) on an EW background.
struct MonopolePair {
  ScalarField V;
  FormField alpha;
};

// V = W_x, alpha = -W_x dy - 2 W_y dt
inline MonopolePair monopole_from_W(const ScalarField& w) {
  if (w.chart() != ew_chart()) throw Error("W must live on chart (x, y, t)");
  return {w.d("x"), detail::one_form_on(ew_chart(), {{"y", -w.d("x")}, {"t", w.d("y") * -2.0}})};
}

// *_h(dV + nu V / 2) - d alpha, orientation dx^dy^dt.
inline FormField monopole_defect(const EWStructure& ew, const MonopolePair& m) {
  FormField dv = exterior_derivative(FormField::scalar(m.V));
  FormField src = dv + m.V * (0.5 * ew.nu);
  return hodge_star(src, ew.h, 1) - exterior_derivative(m.alpha);
}

inline double monopole_residual(const EWStructure& ew, const MonopolePair& m,
                                const std::vector<std::vector<double>>& pts) {
  return max_abs_over(monopole_defect(ew, m), pts);
}

inline double monopole_residual(const EWStructure& ew, const MonopolePair& m, std::size_t n = 100,
                                std::uint64_t seed = 7) {
  return monopole_residual(ew, m, detail::default_points(ew.h.domain(), ew.h.chart(), n, seed));
}

inline MetricField build_metric(const ScalarField& h, const ScalarField& w) { return dkp_metric(h, w); }

// Scalar curvature of build_metric(H, W) in closed form,
// R = -W_x^{-1} d_x(L / W_x) with L the lindKP residual.
inline ScalarField scalar_curvature_formula(const ScalarField& h, const ScalarField& w) {
  ScalarField wx = w.d("x");
  return -(residual_lindkp(h, w) / wx).d("x") / wx;
}

// The printed alternative 8(W_xyy - W_xxt + (H_x W_x)_xx) W_x, kept for comparison.
inline ScalarField scalar_curvature_printed(const ScalarField& h, const ScalarField& w) {
  return 8.0 * residual_lindkp(h, w).d("x") * w.d("x");
}

// Self-dual two-forms of the dKP tetrad as coordinate formulas on (x, y, t, z),
// in the normalisation
//   S00 = dz^dt,  S01 = dt^d(z^2) + 2 dt^dW + dy^dz,
//   S11 = 2W_x dx^dy + 2(z W_x + W_y) dx^dt - dx^dz + (2 H_x W_x - 2z W_y) dt^dy
//         + z dz^dy + (H_x + z^2) dz^dt,
// satisfying -2 S00^S11 = S01^S01. S01 is -2 times the frame normalisation.
struct SDTwoForms {
  std::array<FormField, 3> sigma;
  FormField d_sigma11_printed;    // d(H_x - 2W)^dt^dz + (W_xt - W_yy - (H_x W_x)_x) dx^dy^dt
  FormField d_sigma11_corrected;  // -d(H_x - 2W)^dt^dz - 2 L dx^dy^dt
};

inline SDTwoForms sd_two_forms(const ScalarField& h, const ScalarField& w) {
  using detail::dkp_lift;
  const auto& ch = dkp_chart();
  enum { X, Y, T, Z };
  ScalarField hx = dkp_lift(h.d("x")), wl = dkp_lift(w), wx = dkp_lift(w.d("x")), wy = dkp_lift(w.d("y"));
  ScalarField z = ScalarField::closed_form(Expr::variable("z"), ch);
  ScalarField one = ScalarField::constant(1.0, ch);
  auto dd = [&](const char* c) { return FormField::differential(c, ch); };
  auto d = [](const ScalarField& f) { return exterior_derivative(FormField::scalar(f)); };
  SDTwoForms s;
  s.sigma[0] = wedge(dd("z"), dd("t"));
  s.sigma[1] = wedge(dd("t"), d(z * z)) + 2.0 * wedge(dd("t"), d(wl)) + wedge(dd("y"), dd("z"));
  FormField s11(2, ch);
  s11.set({X, Y}, wx * 2.0);
  s11.set({X, T}, (z * wx + wy) * 2.0);
  s11.set({X, Z}, -one);
  s11.set({T, Y}, (hx * wx - z * wy) * 2.0);
  s11.set({Z, Y}, z);
  s11.set({Z, T}, hx + z * z);
  s.sigma[2] = s11;

  ScalarField L = dkp_lift(residual_lindkp(h, w));
  FormField dtdz = wedge(dd("t"), dd("z"));
  FormField gauge = wedge(d(hx - 2.0 * wl), dtdz);
  FormField vol3 = wedge(wedge(dd("x"), dd("y")), dd("t"));
  s.d_sigma11_printed = gauge + (-L) * vol3;
  s.d_sigma11_corrected = -1.0 * gauge + (L * -2.0) * vol3;
  return s;
}

struct SDFormReport {
  double d_sigma00 = 0.0;
  double d_sigma01 = 0.0;
  double sigma11_printed = 0.0;    // max |d S11 - printed RHS|
  double sigma11_corrected = 0.0;  // max |d S11 - corrected RHS|
  double d_sigma11 = 0.0;          // max |d S11|
  double wedge_identity = 0.0;     // max |-2 S00^S11 - S01^S01|
  double frame_mismatch = 0.0;     // coordinate formulas vs the tetrad
};

inline SDFormReport sd_form_report(const ScalarField& h, const ScalarField& w,
                                   const std::vector<std::vector<double>>& pts) {
  SDTwoForms s = sd_two_forms(h, w);
  SigmaFields f = sigma_fields(dkp_coframe(h, w));
  FormField d11 = exterior_derivative(s.sigma[2]);
  SDFormReport r;
  r.d_sigma00 = max_abs_over(exterior_derivative(s.sigma[0]), pts);
  r.d_sigma01 = max_abs_over(exterior_derivative(s.sigma[1]), pts);
  r.d_sigma11 = max_abs_over(d11, pts);
  r.sigma11_printed = max_abs_over(d11 - s.d_sigma11_printed, pts);
  r.sigma11_corrected = max_abs_over(d11 - s.d_sigma11_corrected, pts);
  r.wedge_identity = max_abs_over(-2.0 * wedge(s.sigma[0], s.sigma[2]) - wedge(s.sigma[1], s.sigma[1]), pts);
  r.frame_mismatch = std::max({max_abs_over(s.sigma[0] - f.primed[0], pts),
                               max_abs_over(s.sigma[1] + 2.0 * f.primed[1], pts),
                               max_abs_over(s.sigma[2] - f.primed[2], pts)});
  return r;
}

// Reduction along the Killing field K = d/d(killing):
//   h = |K|^{-2} g - |K|^{-4} K (x) K,  nu = 2|K|^{-2} *_g(K ^ dK),
// restricted to the remaining coordinates at killing = slice. The Hodge
// star uses the given orientation of the chart.
inline EWStructure jones_tod_reduce(const MetricField& g, const std::string& killing = "z", double slice = 0.0,
                                    int orientation = 1) {
  const auto& ch = g.chart();
  if (g.dim() != 4) throw Error("jones_tod_reduce needs a 4D metric");
  const ScalarField probe = ScalarField::constant(0.0, ch);
  const int k = probe.axis(killing);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      if (g(i, j).backend() != Backend::ClosedForm) throw Error("jones_tod_reduce needs closed-form metric components");
  ScalarField norm = g(k, k);
  detail::definite_sign(norm.with_domain(g.domain()), "|K|^2 (Killing norm)");

  std::vector<std::string> rest;
  for (const auto& c : ch)
    if (c != killing) rest.push_back(c);
  auto reduce = [&](const ScalarField& f) {
    Expr e = substitute(f.expr(), killing, Expr(slice));
    return ScalarField::closed_form(e, rest, g.domain());
  };
  std::vector<int> idx;
  for (int i = 0; i < 4; ++i)
    if (i != k) idx.push_back(i);
  std::vector<ScalarField> upper;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a; b < 3; ++b) {
      const int i = idx[a], j = idx[b];
      upper.push_back(reduce(g(i, j) / norm - g(i, k) * g(j, k) / (norm * norm)));
    }
  MetricField h(rest, upper, 1);

  std::vector<ScalarField> kflat;
  for (int i = 0; i < 4; ++i) kflat.push_back(g(i, k));
  FormField kb = FormField::one_form(kflat);
  FormField star = hodge_star(wedge(kb, exterior_derivative(kb)), g, orientation);
  std::vector<ScalarField> nu;
  for (int i : idx) nu.push_back(reduce(star.get({i}) * 2.0 / norm));
  return {h, FormField::one_form(nu)};
}

// (H_xx/2)(dy^2 - 4 dx dt - 4 H_x dt^2) - (2/H_xx)(dz - H_xx dy/2 - H_xy dt)^2
inline MetricField hyperkahler_specialize(const ScalarField& h) {
  ScalarField hxx = h.d("x", 2);
  int sign = detail::definite_sign(hxx, "H_xx");
  using detail::dkp_lift;
  ScalarField v = dkp_lift(hxx) * 0.5, a = dkp_lift(h.differentiate(MultiIndex::of(h.chart(), {"x", "y"})));
  ScalarField hx = dkp_lift(h.d("x"));
  const auto& ch = dkp_chart();
  auto c = [&](double k) { return ScalarField::constant(k, ch); };
  // order: xx xy xt xz yy yt yz tt tz zz
  std::vector<ScalarField> upper{c(0), c(0), v * -2.0, c(0),
                                 c(0), -a, c(1.0),
                                 v * hx * -4.0 - a * a / v, a / v,
                                 -1.0 / v};
  return MetricField(ch, upper, -sign);
}

}  // namespace asdnk
