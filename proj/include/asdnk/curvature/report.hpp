#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "asdnk/curvature/cartan.hpp"
#include "asdnk/curvature/riemann.hpp"
#include "asdnk/spinor/forms.hpp"
#include "json.hpp"

namespace asdnk {

// Scalar curvature from the Cartan trace tr = eps^{AC} eps^{BD} X_ABCD,
// R = kScalarTrace * tr (MTW sign of R). Calibrated once against the
// coordinate oracle on a generic coframe.
inline constexpr double kScalarTrace = -4.0;

// Curvature spinors at a point. Totally symmetric spinors are stored by the
// number of 1 indices (C[k] = C_{0..01..1}); phi[pair(A,B)][pair(A',B')].
// Spinor parts use the Penrose-Rindler sign of the Riemann tensor; the
// scalar is reported with the MTW sign (positive on the round sphere).
struct CurvatureReport {
  std::array<double, 5> weyl_asd{};
  std::array<double, 5> weyl_sd{};
  Mat<double, 3> phi{};
  double scalar = 0.0;
  std::vector<double> raw;  // oracle R_abcd (MTW, coordinates), empty for Cartan
  std::string method;

  double max_weyl_sd() const {
    double m = 0.0;
    for (double v : weyl_sd) m = std::max(m, std::abs(v));
    return m;
  }
  double max_weyl_asd() const {
    double m = 0.0;
    for (double v : weyl_asd) m = std::max(m, std::abs(v));
    return m;
  }
  double max_phi() const {
    double m = 0.0;
    for (const auto& r : phi)
      for (double v : r) m = std::max(m, std::abs(v));
    return m;
  }
};

namespace detail {

// Symmetrisation of a rank-4 two-spinor given as x(A,B,C,D).
template <class F>
std::array<double, 5> symmetrise4(const F& x) {
  std::array<double, 5> out{};
  for (int k = 0; k <= 4; ++k) {
    std::array<int, 4> idx{};
    for (int i = 0; i < 4; ++i) idx[static_cast<std::size_t>(i)] = i >= 4 - k ? 1 : 0;
    double s = 0.0;
    int count = 0;
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
      s += x(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out[static_cast<std::size_t>(k)] = s / count;
  }
  return out;
}

// Expands a two-form in the basis (Sigma^00, Sigma^01, Sigma^11,
// Sigma^0'0', Sigma^0'1', Sigma^1'1') and returns the coefficients.
inline std::array<double, 6> sigma_coefficients(const FormValue& w, const SigmaBasis& s) {
  std::vector<double> a(36), b(6);
  for (int r = 0; r < 6; ++r) {
    b[static_cast<std::size_t>(r)] = w.comps[static_cast<std::size_t>(r)];
    for (int c = 0; c < 3; ++c) {
      a[static_cast<std::size_t>(r * 6 + c)] = s.unprimed[static_cast<std::size_t>(c)].comps[static_cast<std::size_t>(r)];
      a[static_cast<std::size_t>(r * 6 + 3 + c)] = s.primed[static_cast<std::size_t>(c)].comps[static_cast<std::size_t>(r)];
    }
  }
  auto x = solve_dense(a, b, 6, 1e-12);
  std::array<double, 6> out{};
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

}  // namespace detail

// Projects the curvature two-forms onto the Sigma basis of the same
// coframe: R_AB = X_ABCD Sigma^CD + Phi_ABC'D' Sigma^C'D'.
inline CurvatureReport decompose_curvature(const CurvatureForms& r, const SigmaBasis& s) {
  // coefficient template c0 Sigma^00 + 2 c1 Sigma^01 + c2 Sigma^11
  auto unpack = [](double c0, double c1, double c2) { return std::array<double, 3>{c0, 0.5 * c1, c2}; };
  std::array<std::array<double, 3>, 3> X{}, Xp{}, Phi{}, PhiP{};
  for (int p = 0; p < 3; ++p) {
    auto cu = detail::sigma_coefficients(r.unprimed[static_cast<std::size_t>(p)], s);
    X[static_cast<std::size_t>(p)] = unpack(cu[0], cu[1], cu[2]);
    Phi[static_cast<std::size_t>(p)] = unpack(cu[3], cu[4], cu[5]);
    auto cp = detail::sigma_coefficients(r.primed[static_cast<std::size_t>(p)], s);
    PhiP[static_cast<std::size_t>(p)] = unpack(cp[0], cp[1], cp[2]);
    Xp[static_cast<std::size_t>(p)] = unpack(cp[3], cp[4], cp[5]);
  }
  CurvatureReport out;
  out.method = "cartan";
  auto x4 = [&](const std::array<std::array<double, 3>, 3>& t) {
    return [&t](int A, int B, int C, int D) {
      return t[static_cast<std::size_t>(pair_index(A, B))][static_cast<std::size_t>(pair_index(C, D))];
    };
  };
  out.weyl_asd = detail::symmetrise4(x4(X));
  out.weyl_sd = detail::symmetrise4(x4(Xp));
  // Phi_ABC'D' from R_AB; the primed forms carry the transpose
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out.phi[i][k] = 0.5 * (Phi[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] + PhiP[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
  double tr = 0.0;
  for (int A = 0; A < 2; ++A)
    for (int B = 0; B < 2; ++B)
      for (int C = 0; C < 2; ++C)
        for (int D = 0; D < 2; ++D) tr += Epsilon::upper[A][C] * Epsilon::upper[B][D] * x4(X)(A, B, C, D);
  out.scalar = kScalarTrace * tr;
  return out;
}

inline CurvatureReport cartan_report(const CoFrame& cf, const double* p) {
  CoframeJet j = cf.jet(p, 2);
  SpinConnection g = spin_connection(j);
  return decompose_curvature(curvature_two_forms(g), sigma_basis(j.e));
}
inline CurvatureReport cartan_report(const CoFrame& cf, const std::vector<double>& p) { return cartan_report(cf, p.data()); }

// Spinor decomposition of oracle Riemann in the null frame e (rows = frame
// one-forms at the same point).
inline CurvatureReport decompose_riemann(const RiemannData& rd, const CoframeValue& e) {
  if (rd.n != 4) throw Error("spinor decomposition needs a 4D metric");
  Mat<double, 4> E = inverse<4>(e);  // E[m][a]: frame vectors
  std::array<double, 256> fr{};
  auto at = [](int a, int b, int c, int d) { return static_cast<std::size_t>(((a * 4 + b) * 4 + c) * 4 + d); };
  // partial contractions keep this O(n^5)
  std::array<double, 256> t1{}, t2{}, t3{};
  for (int a = 0; a < 4; ++a)
    for (int n = 0; n < 4; ++n)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          double v = 0.0;
          for (int m = 0; m < 4; ++m) v += E[m][a] * rd.R(m, n, r, s);
          t1[at(a, n, r, s)] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          double v = 0.0;
          for (int n = 0; n < 4; ++n) v += E[n][b] * t1[at(a, n, r, s)];
          t2[at(a, b, r, s)] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int s = 0; s < 4; ++s) {
          double v = 0.0;
          for (int r = 0; r < 4; ++r) v += E[r][c] * t2[at(a, b, r, s)];
          t3[at(a, b, c, s)] = v;
        }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double v = 0.0;
          for (int s = 0; s < 4; ++s) v += E[s][d] * t3[at(a, b, c, s)];
          fr[at(a, b, c, d)] = -v;  // Penrose-Rindler sign
        }
  auto R = [&](int A, int Ap, int B, int Bp, int C, int Cp, int D, int Dp) {
    return fr[at(frame_index(A, Ap), frame_index(B, Bp), frame_index(C, Cp), frame_index(D, Dp))];
  };
  const auto& eu = Epsilon::upper;
  auto X = [&](int A, int B, int C, int D) {
    double s = 0.0;
    for (int Ap = 0; Ap < 2; ++Ap)
      for (int Cp = 0; Cp < 2; ++Cp) s += eu[Ap][1 - Ap] * eu[Cp][1 - Cp] * R(A, Ap, B, 1 - Ap, C, Cp, D, 1 - Cp);
    return 0.25 * s;
  };
  auto Xp = [&](int Ap, int Bp, int Cp, int Dp) {
    double s = 0.0;
    for (int A = 0; A < 2; ++A)
      for (int C = 0; C < 2; ++C) s += eu[A][1 - A] * eu[C][1 - C] * R(A, Ap, 1 - A, Bp, C, Cp, 1 - C, Dp);
    return 0.25 * s;
  };
  CurvatureReport out;
  out.method = "oracle";
  out.weyl_asd = detail::symmetrise4(X);
  out.weyl_sd = detail::symmetrise4(Xp);
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const int A = pairs[i][0], B = pairs[i][1], Cp = pairs[k][0], Dp = pairs[k][1];
      double s = 0.0;
      for (int Ap = 0; Ap < 2; ++Ap)
        for (int C = 0; C < 2; ++C) s += eu[Ap][1 - Ap] * eu[C][1 - C] * R(A, Ap, B, 1 - Ap, C, Cp, 1 - C, Dp);
      out.phi[i][k] = 0.25 * s;
    }
  out.scalar = rd.scalar;
  out.raw = rd.riemann;
  return out;
}

inline CurvatureReport oracle_report(const MetricField& g, const CoframeValue& e, const double* p) {
  return decompose_riemann(coordinate_curvature(g, p), e);
}

// Largest componentwise difference in C, C', Phi and R, relative to
// max(1, largest magnitude in a).
inline double report_difference(const CurvatureReport& a, const CurvatureReport& b) {
  double scale = std::max({1.0, a.max_weyl_asd(), a.max_weyl_sd(), a.max_phi(), std::abs(a.scalar)});
  double d = std::abs(a.scalar - b.scalar);
  for (int k = 0; k < 5; ++k) {
    d = std::max(d, std::abs(a.weyl_asd[static_cast<std::size_t>(k)] - b.weyl_asd[static_cast<std::size_t>(k)]));
    d = std::max(d, std::abs(a.weyl_sd[static_cast<std::size_t>(k)] - b.weyl_sd[static_cast<std::size_t>(k)]));
  }
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(a.phi[i][k] - b.phi[i][k]));
  return d / scale;
}

inline std::string spinor_label(int ones) {
  std::string s;
  for (int i = 0; i < 4; ++i) s += i >= 4 - ones ? '1' : '0';
  return s;
}

inline nlohmann::json to_json(const CurvatureReport& r) {
  static const char* pairs[3] = {"00", "01", "11"};
  nlohmann::json j;
  j["method"] = r.method;
  for (int k = 0; k < 5; ++k) {
    j["C_" + spinor_label(k)] = r.weyl_asd[static_cast<std::size_t>(k)];
    j["Cp_" + spinor_label(k)] = r.weyl_sd[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) j[std::string("Phi_") + pairs[i] + "_" + pairs[k]] = r.phi[i][k];
  j["R"] = r.scalar;
  j["summary"] = {{"max_C", r.max_weyl_asd()}, {"max_Cp", r.max_weyl_sd()}, {"max_Phi", r.max_phi()}};
  if (!r.raw.empty()) j["riemann"] = r.raw;
  return j;
}

}  // namespace asdnk
