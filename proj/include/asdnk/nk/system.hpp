#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "asdnk/curvature/report.hpp"
#include "asdnk/error.hpp"
#include "asdnk/fields/polynomial.hpp"
#include "asdnk/fields/scalar_field.hpp"
#include "asdnk/geometry/constructors.hpp"

namespace asdnk {

// Potential Th and the function f on chart (w, z, x, y).
struct NKSolution {
  ScalarField theta;
  ScalarField f;
};

namespace detail {

inline ScalarField dxy(const ScalarField& s) { return s.differentiate(MultiIndex::of(s.chart(), {"x", "y"})); }

}  // namespace detail

// f = Th_wx + Th_zy + Th_xx Th_yy - Th_xy^2
inline ScalarField induced_f(const ScalarField& th) {
  const auto& ch = th.chart();
  ScalarField txy = detail::dxy(th);
  return th.differentiate(MultiIndex::of(ch, {"w", "x"})) + th.differentiate(MultiIndex::of(ch, {"z", "y"})) +
         th.d("x", 2) * th.d("y", 2) - txy * txy;
}

inline ScalarField residual_nk1(const ScalarField& th, const ScalarField& f) { return induced_f(th) - f; }

// box f = f_xw + f_yz + Th_yy f_xx + Th_xx f_yy - 2 Th_xy f_xy
inline ScalarField box(const ScalarField& th, const ScalarField& f) {
  const auto& ch = f.chart();
  return f.differentiate(MultiIndex::of(ch, {"x", "w"})) + f.differentiate(MultiIndex::of(ch, {"y", "z"})) +
         th.d("y", 2) * f.d("x", 2) + th.d("x", 2) * f.d("y", 2) - 2.0 * detail::dxy(th) * detail::dxy(f);
}

inline ScalarField residual_nk2(const ScalarField& th, const ScalarField& f) { return box(th, f); }

inline Domain nk_unit_domain() {
  Domain d;
  for (const auto& c : nk_chart()) d.bound(c, -1.0, 1.0);
  return d;
}

// The closed-form families. Parameters are Exprs in the family's variables:
//   1: A(w, y), B(w, y), polynomial in y     Th = B + z int A dy,      f = A
//   2: P(w, y), Q(w, y), polynomial in y     Th = x int P dy + n,      f = Th_x
//      n = z N + int int Q,  N = int int (P - P_w) + int P^2 dy
//   3: A(s)                                  Th = A(x / y),            f = induced
//   4: A(y), B(y)                            Th = x A + B,             f = -(A_y)^2
// Missing parameters default to 0. Family 3 defaults to y in [1, 2].
inline NKSolution example_family(int kind, const std::map<std::string, Expr>& params, Domain domain = {}) {
  auto param = [&](const char* name) {
    auto it = params.find(name);
    return it == params.end() ? Expr(0.0) : it->second;
  };
  const auto& ch = nk_chart();
  if (domain.box().empty()) {
    domain = nk_unit_domain();
    if (kind == 3) domain.bound("y", 1.0, 2.0);
  }
  auto allowed = [&](const Expr& e, std::initializer_list<const char*> vars, const char* what) {
    for (const auto& v : variables(e))
      if (std::none_of(vars.begin(), vars.end(), [&](const char* a) { return v == a; }))
        throw Error(std::string("family parameter ") + what + " may not depend on '" + v + "'");
  };
  const Expr x = Expr::variable("x"), y = Expr::variable("y"), z = Expr::variable("z");
  Expr theta, f;
  switch (kind) {
    case 1: {
      Expr A = param("A"), B = param("B");
      allowed(A, {"w", "y"}, "A");
      allowed(B, {"w", "y"}, "B");
      theta = B + z * antiderivative(A, "y");
      f = A;
      break;
    }
    case 2: {
      Expr P = param("P"), Q = param("Q");
      allowed(P, {"w", "y"}, "P");
      allowed(Q, {"w", "y"}, "Q");
      Expr iiy = antiderivative(antiderivative(P - diff(P, "w"), "y"), "y") + antiderivative(P * P, "y");
      theta = x * antiderivative(P, "y") + z * iiy + antiderivative(antiderivative(Q, "y"), "y");
      f = diff(theta, "x");
      break;
    }
    case 3: {
      Expr A = param("A");
      allowed(A, {"s"}, "A");
      theta = substitute(A, "s", x / y);
      break;
    }
    case 4: {
      Expr A = param("A"), B = param("B");
      allowed(A, {"y"}, "A");
      allowed(B, {"y"}, "B");
      theta = x * A + B;
      Expr ay = diff(A, "y");
      f = -(ay * ay);
      break;
    }
    default: throw Error("unknown example family " + std::to_string(kind));
  }
  NKSolution s;
  s.theta = ScalarField::closed_form(theta, ch, domain);
  s.f = kind == 3 ? induced_f(s.theta) : ScalarField::closed_form(f, ch, domain);
  return s;
}

// Curvature predicted in closed form for the nk coframe, with
// d_0 = d/dy, d_1 = -d/dx:
//   C_ABCD = kKappa1 d_A d_B d_C d_D Th, C'_0'0'0'0' = kKappa2 box f,
//   Phi_AB0'0' = d_A d_B f, R = 0.
inline CurvatureReport nk_shortcut_report(const NKSolution& s, const double* p) {
  const auto& ch = s.theta.chart();
  CurvatureReport r;
  r.method = "closed_form";
  for (int k = 0; k <= 4; ++k) {
    MultiIndex mi;
    mi.set(s.theta.axis("y"), 4 - k);
    mi.set(s.theta.axis("x"), k);
    r.weyl_asd[static_cast<std::size_t>(k)] = kKappa1 * (k % 2 ? -1.0 : 1.0) * s.theta.differentiate(mi).evaluate(p);
  }
  r.weyl_sd[0] = kKappa2 * box(s.theta, s.f).evaluate(p);
  r.phi[0][0] = s.f.d("y", 2).evaluate(p);
  r.phi[1][0] = -s.f.differentiate(MultiIndex::of(ch, {"x", "y"})).evaluate(p);
  r.phi[2][0] = s.f.d("x", 2).evaluate(p);
  return r;
}

// Two vector fields on (w, z, x, y, lambda); coefficient k multiplies d/d(chart[k]).
//   L0 = d_w - Th_xy d_y + Th_yy d_x - lambda d_y + f_y d_lambda
//   L1 = d_z + Th_xx d_y - Th_xy d_x + lambda d_x - f_x d_lambda
struct LaxFields {
  std::vector<std::string> chart;
  std::array<std::array<ScalarField, 5>, 2> coeff;
  std::array<std::array<std::array<ScalarField, 5>, 5>, 2> grad;  // grad[i][k][j] = d_j coeff[i][k]
};

inline const std::vector<std::string>& lax_chart() {
  static const std::vector<std::string> c{"w", "z", "x", "y", "lambda"};
  return c;
}

inline LaxFields lax_fields(const ScalarField& th, const ScalarField& f) {
  if (th.backend() != Backend::ClosedForm || f.backend() != Backend::ClosedForm)
    throw Error("lax_fields needs closed-form Th and f");
  const auto& ch = lax_chart();
  auto lift = [&](const ScalarField& s) { return ScalarField::closed_form(s.expr(), ch, s.domain()); };
  ScalarField txx = lift(th.d("x", 2)), tyy = lift(th.d("y", 2)), txy = lift(detail::dxy(th));
  ScalarField fx = lift(f.d("x")), fy = lift(f.d("y"));
  ScalarField lam = ScalarField::closed_form(Expr::variable("lambda"), ch);
  ScalarField one = ScalarField::constant(1.0, ch), zero = ScalarField::constant(0.0, ch);
  LaxFields L;
  L.chart = ch;
  L.coeff[0] = {one, zero, tyy, -txy - lam, fy};
  L.coeff[1] = {zero, one, lam - txy, txx, -fx};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 5; ++k)
      for (int j = 0; j < 5; ++j)
        L.grad[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
            L.coeff[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].differentiate(MultiIndex::unit(j));
  return L;
}

// [L0, L1]^k = L0^j d_j L1^k - L1^j d_j L0^k at (point, lambda).
inline std::array<double, 5> lax_commutator(const LaxFields& L, const double* point4, double lambda) {
  const double p[5] = {point4[0], point4[1], point4[2], point4[3], lambda};
  auto val = [&](const ScalarField& s) { return s.is_zero() ? 0.0 : s.evaluate(p); };
  std::array<double, 5> c0{}, c1{}, out{};
  for (int j = 0; j < 5; ++j) {
    c0[static_cast<std::size_t>(j)] = val(L.coeff[0][static_cast<std::size_t>(j)]);
    c1[static_cast<std::size_t>(j)] = val(L.coeff[1][static_cast<std::size_t>(j)]);
  }
  for (int k = 0; k < 5; ++k) {
    double s = 0.0;
    for (int j = 0; j < 5; ++j) {
      if (c0[static_cast<std::size_t>(j)] != 0.0) s += c0[static_cast<std::size_t>(j)] * val(L.grad[1][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
      if (c1[static_cast<std::size_t>(j)] != 0.0) s -= c1[static_cast<std::size_t>(j)] * val(L.grad[0][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
    }
    out[static_cast<std::size_t>(k)] = s;
  }
  return out;
}

inline double max_abs(const std::array<double, 5>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace asdnk
