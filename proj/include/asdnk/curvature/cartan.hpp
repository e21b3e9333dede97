#pragma once

#include <array>
#include <vector>

#include "asdnk/dual.hpp"
#include "asdnk/geometry/metric.hpp"
#include "asdnk/linalg.hpp"
#include "asdnk/spinor/forms.hpp"
#include "asdnk/spinor/spinor.hpp"

namespace asdnk {

using Jet4 = Dual<4>;

// Connection one-forms Gamma_AB and Gamma_A'B' (lower, symmetric; index =
// pair_index) in coordinate components, each with its first derivatives.
struct SpinConnection {
  std::array<std::array<Jet4, 4>, 3> unprimed{};
  std::array<std::array<Jet4, 4>, 3> primed{};
  double structure_residual = 0.0;  // max |de - e^Gamma - e^Gamma'| at the point

  FormValue value(bool primed_part, int pair) const {
    const auto& src = primed_part ? primed : unprimed;
    FormValue f(1, 4);
    for (int m = 0; m < 4; ++m) f.comps[static_cast<std::size_t>(m)] = src[static_cast<std::size_t>(pair)][static_cast<std::size_t>(m)].v;
    return f;
  }
};

namespace detail {

// Gamma^A_B = eps^{AC} Gamma_CB: Gamma^0_B = Gamma_1B, Gamma^1_B = -Gamma_0B.
inline int raised_source(int A) { return 1 - A; }
inline double raised_sign(int A) { return Epsilon::upper[A][1 - A]; }

}  // namespace detail

// Solves de^{AA'} = e^{BA'} ^ Gamma^A_B + e^{AB'} ^ Gamma^{A'}_{B'} for the 24
// connection components. The jet carries coordinate derivatives so dGamma
// comes out of the same solve.
inline SpinConnection spin_connection(const CoframeJet& j) {
  constexpr int kN = 24;
  auto unknown = [](bool primed, int pair, int m) { return ((primed ? 3 : 0) + pair) * 4 + m; };
  std::array<std::array<Jet4, 4>, 4> e{};
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) {
      std::array<double, 4> g{};
      for (int r = 0; r < 4; ++r) g[static_cast<std::size_t>(r)] = j.de[a][m][r];
      e[a][m] = Jet4(j.e[a][m], g);
    }
  std::vector<Jet4> mat(kN * kN, Jet4(0.0)), rhs(kN, Jet4(0.0));
  auto pairs = combinations(4, 2);
  int row = 0;
  for (int A = 0; A < 2; ++A)
    for (int Ap = 0; Ap < 2; ++Ap) {
      const int a = frame_index(A, Ap);
      for (const auto& mn : pairs) {
        const int m = mn[0], n = mn[1];
        std::array<double, 4> g{};
        for (int r = 0; r < 4; ++r) g[static_cast<std::size_t>(r)] = j.dde[a][n][m][r] - j.dde[a][m][n][r];
        rhs[static_cast<std::size_t>(row)] = Jet4(j.de[a][n][m] - j.de[a][m][n], g);
        auto add = [&](int col, const Jet4& c) {
          auto& slot = mat[static_cast<std::size_t>(row * kN + col)];
          slot = slot + c;
        };
        for (int B = 0; B < 2; ++B) {
          // e^{BA'} ^ Gamma^A_B
          const Jet4 s(detail::raised_sign(A));
          const int pr = pair_index(detail::raised_source(A), B);
          const auto& eb = e[frame_index(B, Ap)];
          add(unknown(false, pr, n), s * eb[m]);
          add(unknown(false, pr, m), -(s * eb[n]));
          // e^{AB'} ^ Gamma^{A'}_{B'}
          const Jet4 sp(detail::raised_sign(Ap));
          const int pp = pair_index(detail::raised_source(Ap), B);
          const auto& ep = e[frame_index(A, B)];
          add(unknown(true, pp, n), sp * ep[m]);
          add(unknown(true, pp, m), -(sp * ep[n]));
        }
        ++row;
      }
    }
  std::vector<Jet4> x = solve_dense(mat, rhs, kN, 1e-12);
  SpinConnection out;
  for (int s = 0; s < 3; ++s)
    for (int m = 0; m < 4; ++m) {
      out.unprimed[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] = x[static_cast<std::size_t>(unknown(false, s, m))];
      out.primed[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)] = x[static_cast<std::size_t>(unknown(true, s, m))];
    }
  double res = 0.0;
  for (int r = 0; r < kN; ++r) {
    double s = -rhs[static_cast<std::size_t>(r)].v;
    for (int c = 0; c < kN; ++c) s += mat[static_cast<std::size_t>(r * kN + c)].v * x[static_cast<std::size_t>(c)].v;
    res = std::max(res, std::abs(s));
  }
  out.structure_residual = res;
  return out;
}

inline SpinConnection spin_connection(const CoFrame& cf, const double* p) { return spin_connection(cf.jet(p, 2)); }

// Curvature two-forms, lowered as R_AB = R^C_B eps_CA; index = pair_index.
struct CurvatureForms {
  std::array<FormValue, 3> unprimed;
  std::array<FormValue, 3> primed;
  double symmetry_residual = 0.0;  // |R_01 - R_10| before symmetrising
};

// R^A_B = dGamma^A_B + Gamma^A_C ^ Gamma^C_B
inline CurvatureForms curvature_two_forms(const SpinConnection& gam) {
  CurvatureForms out;
  auto pairs = combinations(4, 2);
  for (bool primed : {false, true}) {
    const auto& G = primed ? gam.primed : gam.unprimed;
    // raised[A][B][m]
    auto up = [&](int A, int B, int m) -> Jet4 {
      const Jet4& g = G[static_cast<std::size_t>(pair_index(detail::raised_source(A), B))][static_cast<std::size_t>(m)];
      return detail::raised_sign(A) * g;
    };
    std::array<std::array<FormValue, 2>, 2> R{};
    for (int A = 0; A < 2; ++A)
      for (int B = 0; B < 2; ++B) {
        FormValue f(2, 4);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const int m = pairs[k][0], n = pairs[k][1];
          double v = up(A, B, n).d[static_cast<std::size_t>(m)] - up(A, B, m).d[static_cast<std::size_t>(n)];
          for (int C = 0; C < 2; ++C) v += up(A, C, m).v * up(C, B, n).v - up(A, C, n).v * up(C, B, m).v;
          f.comps[k] = v;
        }
        R[A][B] = f;
      }
    // R_AB = R^C_B eps_CA: R_0B = -R^1_B, R_1B = R^0_B
    auto lowered = [&](int A, int B) { return Epsilon::lower[1 - A][A] * R[1 - A][B]; };
    auto& dst = primed ? out.primed : out.unprimed;
    dst[0] = lowered(0, 0);
    dst[2] = lowered(1, 1);
    FormValue r01 = lowered(0, 1), r10 = lowered(1, 0);
    dst[1] = 0.5 * (r01 + r10);
    out.symmetry_residual = std::max(out.symmetry_residual, (r01 - r10).max_abs());
  }
  return out;
}

}  // namespace asdnk
