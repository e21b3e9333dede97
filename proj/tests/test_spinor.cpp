#include <gtest/gtest.h>

#include <random>

#include "asdnk/spinor/forms.hpp"
#include "asdnk/spinor/spinor.hpp"

using namespace asdnk;

namespace {

CoframeValue random_coframe(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    CoframeValue e{};
    for (auto& row : e)
      for (auto& v : row) v = u(rng);
    if (std::abs(determinant<4>(e)) > 0.05) return e;
  }
}

FormValue random_two_form(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FormValue w(2, 4);
  for (auto& c : w.comps) c = u(rng);
  return w;
}

// Flat null-Kaehler coframe on (w, z, x, y).
CoframeValue flat_nk() {
  CoframeValue e{};
  e[frame_index(0, 0)] = {1, 0, 0, 0};
  e[frame_index(1, 0)] = {0, 1, 0, 0};
  e[frame_index(0, 1)] = {0, 0, 0, -0.5};
  e[frame_index(1, 1)] = {0, 0, 0.5, 0};
  return e;
}

}  // namespace

TEST(Spinor, LowerRaise) {
  Spinor2 o{{1.0, 0.0}, Chirality::Unprimed, Variance::Upper};
  Spinor2 lo = lower(o);
  EXPECT_EQ(lo.c[0], 0.0);
  EXPECT_EQ(lo.c[1], 1.0);
  EXPECT_EQ(lo.variance, Variance::Lower);
  EXPECT_THROW(raise(o), Error);
  EXPECT_THROW(lower(lo), Error);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 100; ++i) {
    Spinor2 v{{u(rng), u(rng)}, i % 2 ? Chirality::Primed : Chirality::Unprimed, Variance::Upper};
    Spinor2 back = raise_lower(raise_lower(v, Direction::Lower), Direction::Raise);
    EXPECT_EQ(back.c, v.c);
    EXPECT_EQ(contract(v, v), 0.0);
  }
}

TEST(Spinor, EpsilonIdentity) {
  for (int A = 0; A < 2; ++A)
    for (int C = 0; C < 2; ++C) {
      double s = 0.0;
      for (int B = 0; B < 2; ++B) s += Epsilon::upper[A][B] * Epsilon::lower[C][B];
      EXPECT_EQ(s, A == C ? 1.0 : 0.0);
    }
  EXPECT_EQ(Epsilon::lower[0][1], 1.0);
}

TEST(Spinor, MixedChiralityContractionRejected) {
  Spinor2 a{{1, 2}, Chirality::Primed, Variance::Upper};
  Spinor2 b{{1, 2}, Chirality::Unprimed, Variance::Upper};
  EXPECT_THROW(contract(a, b), Error);
}

TEST(BiSpinor, Examples) {
  auto m = vector_to_bispinor({1, 0, 0, 0});
  EXPECT_EQ(m[0][0], 1.0);
  EXPECT_EQ(m[0][1], 0.0);
  EXPECT_EQ(m[1][0], 0.0);
  EXPECT_EQ(m[1][1], 1.0);
  m = vector_to_bispinor({0, 1, 0, 0});
  EXPECT_EQ(m[0][1], 1.0);
  EXPECT_EQ(m[1][0], 1.0);
  EXPECT_EQ(m[0][0], 0.0);
}

TEST(BiSpinor, DeterminantIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 4> v{u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(determinant<2>(vector_to_bispinor(v)) - quadratic_form_22(v)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Forms, WedgeAntisymmetry) {
  FormValue dw = one_form_value({1, 0, 0, 0}), dz = one_form_value({0, 1, 0, 0});
  EXPECT_EQ(wedge(dw, dw).max_abs(), 0.0);
  EXPECT_EQ((wedge(dw, dz) + wedge(dz, dw)).max_abs(), 0.0);
  EXPECT_EQ(wedge(dw, dz)({1, 0}), -1.0);
}

TEST(Hodge, FlatSplitExample) {
  DynMatrix g = metric_from_coframe_value(flat_nk());
  EXPECT_EQ(g(0, 2), 0.5);
  EXPECT_EQ(g(1, 3), 0.5);
  int o = coframe_orientation(flat_nk());
  FormValue w(2, 4);
  w.set({0, 1}, 1.0);
  auto s = sd_asd_split(w, g, o);
  EXPECT_LT((s.sd - w).max_abs(), 1e-15);
  EXPECT_LT(s.asd.max_abs(), 1e-15);
}

TEST(Hodge, StarSquaredAndSplit) {
  std::mt19937_64 rng(5);
  double worst_sq = 0.0, worst_sum = 0.0, worst_proj = 0.0;
  for (int i = 0; i < 200; ++i) {
    CoframeValue e = random_coframe(rng);
    DynMatrix g = metric_from_coframe_value(e);
    auto [pos, neg] = signature<4>([&] {
      Mat<double, 4> m{};
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m[a][b] = g(a, b);
      return m;
    }());
    EXPECT_EQ(pos, 2);
    EXPECT_EQ(neg, 2);
    int o = coframe_orientation(e);
    FormValue w = random_two_form(rng);
    FormValue ss = hodge_star(hodge_star(w, g, o), g, o);
    worst_sq = std::max(worst_sq, (ss - w).max_abs());
    auto sp = sd_asd_split(w, g, o);
    worst_sum = std::max(worst_sum, (sp.sd + sp.asd - w).max_abs());
    auto again = sd_asd_split(sp.sd, g, o);
    worst_proj = std::max(worst_proj, (again.sd - sp.sd).max_abs() + again.asd.max_abs());
  }
  EXPECT_LT(worst_sq, 1e-10);
  EXPECT_LT(worst_sum, 1e-12);
  EXPECT_LT(worst_proj, 1e-10);
}

TEST(Hodge, StarOfOneIsVolume) {
  std::mt19937_64 rng(9);
  CoframeValue e = random_coframe(rng);
  DynMatrix g = metric_from_coframe_value(e);
  FormValue one(0, 4);
  one.comps[0] = 1.0;
  FormValue vol = hodge_star(one, g, 1);
  EXPECT_NEAR(vol.comps[0], std::sqrt(std::abs(g.determinant())), 1e-14);
  EXPECT_THROW(hodge_star(one, DynMatrix(4), 1), DegenerateError);
}

TEST(Sigma, FlatNk) {
  auto s = sigma_basis(flat_nk());
  FormValue dwdz(2, 4);
  dwdz.set({0, 1}, 1.0);
  EXPECT_EQ((s.primed[0] - dwdz).max_abs(), 0.0);
}

TEST(Sigma, ReconstructionAndDuality) {
  std::mt19937_64 rng(11);
  double worst_rec = 0.0, worst_dual = 0.0;
  for (int i = 0; i < 100; ++i) {
    CoframeValue e = random_coframe(rng);
    auto s = sigma_basis(e);
    for (int A = 0; A < 2; ++A)
      for (int Ap = 0; Ap < 2; ++Ap)
        for (int B = 0; B < 2; ++B)
          for (int Bp = 0; Bp < 2; ++Bp) {
            FormValue lhs = wedge(frame_one_form(e, frame_index(A, Ap)), frame_one_form(e, frame_index(B, Bp)));
            FormValue rhs = Epsilon::upper[A][B] * sigma(s.primed, Ap, Bp) +
                            Epsilon::upper[Ap][Bp] * sigma(s.unprimed, A, B);
            worst_rec = std::max(worst_rec, (lhs - rhs).max_abs());
          }
    DynMatrix g = metric_from_coframe_value(e);
    int o = coframe_orientation(e);
    for (int k = 0; k < 3; ++k) {
      worst_dual = std::max(worst_dual, (hodge_star(s.primed[k], g, o) - s.primed[k]).max_abs());
      worst_dual = std::max(worst_dual, (hodge_star(s.unprimed[k], g, o) + s.unprimed[k]).max_abs());
    }
  }
  EXPECT_LT(worst_rec, 1e-12);
  EXPECT_LT(worst_dual, 1e-10);
}

TEST(Sigma, DegenerateCoframeRejected) {
  CoframeValue e{};
  EXPECT_THROW(sigma_basis(e), DegenerateError);
}
