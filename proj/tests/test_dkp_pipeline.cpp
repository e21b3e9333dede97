#include <gtest/gtest.h>

#include "asdnk/dkp/pipeline.hpp"

using namespace asdnk;

namespace {

Domain ew_domain() {
  Domain d;
  d.bound("x", -1, 1).bound("y", -1, 1).bound("t", -1, 0.5);
  return d;
}

Domain dkp_domain() {
  Domain d = ew_domain();
  d.bound("z", -1, 1);
  return d;
}

ScalarField f3(const std::string& s) { return ScalarField::parse(s, ew_chart(), ew_domain()); }

const std::string kMainH = "-x^2/(2*(t-1))";
const std::string kYH = "-x^2/(2*(t-1)) + x*y + y^3/(6*(t-1))";

std::vector<std::vector<double>> pts3(std::size_t n = 60) { return sample_points(ew_domain(), ew_chart(), n, 11); }
std::vector<std::vector<double>> pts4(std::size_t n = 40) { return sample_points(dkp_domain(), dkp_chart(), n, 11); }

double max_over(const ScalarField& f, const std::vector<std::vector<double>>& pts) {
  return detail::max_abs_over(f, pts);
}

std::vector<double> head3(const std::vector<double>& p) { return {p[0], p[1], p[2]}; }

struct Downstream {
  double heqn, lindkp, monopole, ew, asd, scalar;
};

Downstream run_pipeline(const ScalarField& h, const ScalarField& w) {
  auto p3 = pts3(), p4 = pts4(20);
  Downstream r{};
  r.heqn = max_over(residual_heqn(h), p3);
  r.lindkp = max_over(residual_lindkp(h, w), p3);
  EWStructure ew = ew_from_u(h.d("x"));
  r.monopole = monopole_residual(ew, monopole_from_W(w), p3);
  r.ew = ew_residual(ew, p3);
  r.asd = check_asd(dkp_coframe(h, w), p4);
  MetricField g = build_metric(h, w);
  for (const auto& p : p4) r.scalar = std::max(r.scalar, std::abs(coordinate_curvature(g, p).scalar));
  return r;
}

}  // namespace

TEST(Heqn, Examples) {
  auto p = pts3();
  EXPECT_LT(max_over(residual_heqn(f3("x*t + y^2/2")), p), 1e-14);
  EXPECT_LT(max_over(residual_heqn(f3(kMainH)), p), 1e-12);
  EXPECT_LT(max_over(residual_heqn(f3(kYH)), p), 1e-12);
  ScalarField r = residual_heqn(f3("x^2"));
  EXPECT_NEAR(r({0.5, 0.2, 0.1}), 2.0, 1e-14);  // 4x
}

TEST(LinDKP, Examples) {
  auto p = pts3();
  for (const auto& hs : {std::string("x*t + y^2/2"), kMainH, kYH}) {
    ScalarField h = f3(hs);
    EXPECT_LT(max_over(residual_lindkp(h, h.d("x")), p), 1e-12) << hs;
  }
  ScalarField zero = f3("0");
  EXPECT_LT(max_over(residual_lindkp(zero, f3("y^2 + 2*x*t")), p), 1e-14);
  EXPECT_NEAR(residual_lindkp(zero, f3("y^3"))({0.1, 0.5, 0.2}), 3.0, 1e-14);
}

TEST(SymmetryW, ExamplesAndLinearisation) {
  std::vector<double> q{0.3, -0.4, 0.2};
  EXPECT_NEAR(symmetry_W(f3("x*t + y^2/2"), 0, 0, 1, 0).evaluate(q), 0.3, 1e-15);
  EXPECT_NEAR(symmetry_W(f3(kMainH), 0, 1, 0, 0).evaluate(q), -0.3 / (0.2 - 1), 1e-15);
  EXPECT_TRUE(symmetry_W(f3(kMainH), 0, 0, 0, 0).is_zero());
  auto p = pts3();
  for (const auto& hs : {std::string("x*t + y^2/2"), kMainH, kYH}) {
    ScalarField h = f3(hs);
    for (auto [a, b, c, e] : {std::array<double, 4>{1, 0, 0, 0}, {0.5, -1, 2, 0.25}, {0, 0, 0, 1}})
      EXPECT_LT(max_over(residual_lindkp(h, symmetry_W(h, a, b, c, e)), p), 1e-11) << hs << " a=" << a;
  }
  // the scaling generator without the -H term is not a solution
  ScalarField h = f3(kMainH);
  ScalarField x = f3("x"), y = f3("y"), t = f3("t");
  ScalarField bare = x * h.d("x") + y * h.d("y") + t * h.d("t");
  EXPECT_GT(max_over(residual_lindkp(h, bare), p), 1e-2);
  EXPECT_THROW(build_metric(h, symmetry_W(h, 0, 0, 0, 0)), DomainError);
}

TEST(EWFromU, Examples) {
  EWStructure flat = ew_from_u(f3("0"));
  std::vector<double> q{0.2, 0.1, -0.3};
  DynMatrix h = flat.h.value(q.data());
  EXPECT_EQ(h(1, 1), 1.0);
  EXPECT_EQ(h(0, 2), -2.0);
  EXPECT_EQ(h(2, 2), 0.0);
  EXPECT_EQ(flat.nu.evaluate(q.data()).max_abs(), 0.0);
  EWStructure ew = ew_from_u(f3("-x/(t-1)"));
  EXPECT_NEAR(ew.nu.evaluate(q.data()).comps[2], 4.0 / (-0.3 - 1), 1e-14);
  for (const auto& p : pts3(30)) {
    auto s = signature_at(ew.h, p.data());
    EXPECT_EQ(s.first, 2);
    EXPECT_EQ(s.second, 1);
  }
}

TEST(EWResidual, Examples) {
  EXPECT_LT(ew_residual(ew_from_u(f3(kMainH).d("x")), pts3()), 1e-6);
  EXPECT_LT(ew_residual(ew_from_u(f3(kYH).d("x")), pts3()), 1e-6);
  EXPECT_GT(ew_residual(ew_from_u(f3("x^2")), pts3()), 1e-2);
  EXPECT_LT(ew_residual(ew_from_u(f3("0")), pts3()), 1e-10);
}

TEST(EWResidual, TracefreeRicciIsDkpDefect) {
  // trace-free symmetric Ricci = -2((u_t - u u_x)_x - u_yy) dt^2
  ScalarField u = f3("x^2*y + t*x^3");
  EWStructure ew = ew_from_u(u);
  ScalarField defect = (u.d("t") - u * u.d("x")).d("x") - u.d("y", 2);
  for (const auto& p : pts3(10)) {
    DynMatrix s = ew_tracefree_ricci(ew, p.data());
    EXPECT_NEAR(s(2, 2), -2.0 * defect.evaluate(p), 1e-9);
    EXPECT_NEAR(s(0, 0), 0.0, 1e-9);
    EXPECT_NEAR(s(0, 1), 0.0, 1e-9);
  }
  // flipping the sign of nu breaks the EW condition on a valid u
  EWStructure flipped = ew_from_u(f3(kMainH).d("x"));
  flipped.nu = -1.0 * flipped.nu;
  EXPECT_GT(ew_residual(flipped, pts3()), 1e-2);
}

TEST(Monopole, Examples) {
  auto p = pts3();
  ScalarField h = f3(kMainH);
  EWStructure ew = ew_from_u(h.d("x"));
  for (const ScalarField& w : {h.d("x"), symmetry_W(h, 1, 0.5, 0.25, 0.0), h.d("x") * 0.5})
    EXPECT_LT(monopole_residual(ew, monopole_from_W(w), p), 1e-8);
  ScalarField hy = f3(kYH);
  EXPECT_LT(monopole_residual(ew_from_u(hy.d("x")), monopole_from_W(hy.d("y") * 0.5), p), 1e-8);

  EWStructure flat = ew_from_u(f3("0"));
  MonopolePair one{f3("1"), FormField(1, ew_chart())};
  EXPECT_EQ(monopole_residual(flat, one, p), 0.0);

  MonopolePair bad = monopole_from_W(h.d("x"));
  bad.alpha = bad.alpha + f3("x") * FormField::differential("y", ew_chart());
  EXPECT_GT(monopole_residual(ew, bad, p), 1e-2);
}

TEST(SDForms, PrintedFormulasAndClosure) {
  auto p = pts4();
  ScalarField h = f3(kMainH);
  SDFormReport r = sd_form_report(h, h.d("x"), p);
  EXPECT_LT(r.frame_mismatch, 1e-12);
  EXPECT_LT(r.d_sigma00, 1e-9);
  EXPECT_LT(r.d_sigma01, 1e-9);
  EXPECT_LT(r.wedge_identity, 1e-10);
  EXPECT_LT(r.sigma11_corrected, 1e-8);
  // the printed RHS differs by 2 d(H_x - 2W)^dt^dz + L dx^dy^dt
  EXPECT_GT(r.sigma11_printed, 1.0);

  SDFormReport half = sd_form_report(h, h.d("x") * 0.5, p);
  EXPECT_LT(half.d_sigma11, 1e-8);
  EXPECT_LT(half.sigma11_printed, 1e-8);
  EXPECT_LT(half.d_sigma00 + half.d_sigma01, 1e-9);

  // off-shell W: the corrected identity still holds, closure of S00, S01 too
  SDFormReport off = sd_form_report(f3("x*y"), f3("x^3 + 2*x + y*t^2"), p);
  EXPECT_LT(off.sigma11_corrected, 1e-9);
  EXPECT_LT(off.frame_mismatch, 1e-12);
  EXPECT_LT(off.wedge_identity, 1e-10);
}

TEST(JonesTod, RoundTrip) {
  auto p = pts3(40);
  for (const auto& hs : {kMainH, kYH}) {
    ScalarField h = f3(hs), w = h.d("x");
    EWStructure rec = jones_tod_reduce(build_metric(h, w));
    EWStructure ew = ew_from_u(h.d("x"));
    ScalarField wx = w.d("x");
    ScalarField lnw2 = ScalarField::closed_form(log(wx.expr() * wx.expr()), ew_chart(), ew_domain());
    FormField expect = ew.nu + exterior_derivative(FormField::scalar(lnw2));
    for (const auto& q : p) {
      DynMatrix a = rec.h.value(q.data()), b = ew.h.value(q.data());
      const double s = wx.evaluate(q);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ASSERT_NEAR(a(i, j), -s * s * b(i, j), 1e-8) << hs;
    }
    EXPECT_LT(max_abs_over(rec.nu - expect, p), 1e-8) << hs;
    // the EW condition is conformally invariant
    EXPECT_LT(ew_residual(rec, p), 1e-6) << hs;
  }
  EWStructure flat = jones_tod_reduce(build_metric(f3("0"), f3("x")));
  std::vector<double> q{0.1, 0.2, 0.3};
  DynMatrix a = flat.h.value(q.data());
  EXPECT_NEAR(a(1, 1), -1.0, 1e-15);
  EXPECT_NEAR(a(0, 2), 2.0, 1e-15);
  EXPECT_NEAR(a(2, 2), 0.0, 1e-15);
  EXPECT_NEAR(a(0, 0) + a(0, 1) + a(1, 2), 0.0, 1e-15);
}

TEST(JonesTod, NullKillingThrows) {
  // g = dx dz + dy dt: d/dz is null
  const auto& ch = dkp_chart();
  auto c = [&](double k) { return ScalarField::constant(k, ch); };
  MetricField g(ch, {c(0), c(0), c(0), c(0.5), c(0), c(0.5), c(0), c(0), c(0), c(0)}, 1);
  EXPECT_THROW(jones_tod_reduce(g), DomainError);
}

TEST(HyperKaehler, RicciFlatAndConsistent) {
  ScalarField h = f3(kMainH);
  MetricField hk = hyperkahler_specialize(h);
  MetricField ref = build_metric(h, h.d("x") * 0.5);
  for (const auto& p : pts4(30)) {
    DynMatrix a = hk.value(p.data()), b = ref.value(p.data());
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ASSERT_NEAR(a(i, j), b(i, j), 1e-10);
    ASSERT_LT(coordinate_curvature(hk, p).max_abs_ricci(), 1e-7);
  }
  EXPECT_EQ(hk.orientation(), ref.orientation());
  EXPECT_THROW(hyperkahler_specialize(f3("x*t + y^2/2")), DomainError);
}

TEST(HyperKaehler, GibbonsHawking) {
  // W_x = 2t must keep a sign, so t in [0.1, 1]
  Domain d = dkp_domain();
  d.bound("t", 0.1, 1.0);
  Domain d3 = ew_domain();
  d3.bound("t", 0.1, 1.0);
  MetricField g = build_metric(ScalarField::parse("0", ew_chart(), d3), ScalarField::parse("y^2 + 2*x*t", ew_chart(), d3));
  for (const auto& p : sample_points(d, dkp_chart(), 30, 5)) EXPECT_LT(coordinate_curvature(g, p).max_abs_ricci(), 1e-7);
  EXPECT_THROW(build_metric(f3("0"), f3("y^2 + 2*x*t")), DomainError);
}

TEST(ScalarCurvature, EmpiricalForm) {
  // off-shell (H, W), so R != 0; the printed form is far off
  ScalarField h = f3("x^3 + y*t"), w = f3("x^3 + 3*x + y*t");
  MetricField g = build_metric(h, w);
  ScalarField formula = scalar_curvature_formula(h, w), printed = scalar_curvature_printed(h, w);
  double rmax = 0.0, dev = 0.0, dev_printed = 0.0;
  for (const auto& p : pts4(30)) {
    double R = coordinate_curvature(g, p).scalar;
    rmax = std::max(rmax, std::abs(R));
    dev = std::max(dev, std::abs(R - formula.evaluate(head3(p))));
    dev_printed = std::max(dev_printed, std::abs(R - printed.evaluate(head3(p))));
  }
  EXPECT_GT(rmax, 1e-2);
  EXPECT_LT(dev, 1e-8 * std::max(1.0, rmax));
  EXPECT_GT(dev_printed, 1e-2);
}

TEST(Pipeline, CoherenceAndNegativeControls) {
  ScalarField h = f3(kMainH);
  Downstream ok = run_pipeline(h, h.d("x"));
  EXPECT_LT(ok.heqn, 1e-6);
  EXPECT_LT(ok.lindkp, 1e-6);
  EXPECT_LT(ok.monopole, 1e-6);
  EXPECT_LT(ok.ew, 1e-6);
  EXPECT_LT(ok.asd, 1e-7);
  EXPECT_LT(ok.scalar, 1e-7);

  // broken H: Heqn fails, hence also the EW residual of u = H_x
  ScalarField hb = f3("x^2");
  Downstream bh = run_pipeline(hb, hb.d("x"));
  EXPECT_GT(bh.heqn, 1e-2);
  EXPECT_GT(bh.ew, 1e-2);
  EXPECT_GT(bh.lindkp, 1e-2);

  // broken W: lindKP and the monopole equation fail, and so does R
  Downstream bw = run_pipeline(h, h.d("x") + f3("x^3"));
  EXPECT_LT(bw.heqn, 1e-6);
  EXPECT_LT(bw.ew, 1e-6);
  EXPECT_GT(bw.lindkp, 1e-2);
  EXPECT_GT(bw.monopole, 1e-2);
  EXPECT_GT(bw.scalar, 1e-2);

  // broken u fed to the EW check directly
  EXPECT_GT(ew_residual(ew_from_u(h.d("x") + f3("y^3")), pts3()), 1e-2);
}

TEST(Pipeline, NonVacuumWitness) {
  ScalarField h = f3(kYH), w = h.d("y") * 0.5;
  EXPECT_LT(max_over(residual_lindkp(h, w), pts3()), 1e-12);
  MetricField g = build_metric(h, w);
  double ric = 0.0, R = 0.0;
  for (const auto& p : pts4(30)) {
    RiemannData rd = coordinate_curvature(g, p);
    ric = std::max(ric, rd.max_abs_ricci());
    R = std::max(R, std::abs(rd.scalar));
  }
  EXPECT_GT(ric, 1e-3);
  EXPECT_LT(R, 1e-7);
  EXPECT_LT(check_asd(dkp_coframe(h, w), pts4(20)), 1e-7);
}
