// Builds the closed-form null-Kahler families and prints their residuals
// and curvature at one point, next to the x^2 y^2 negative control.

#include <cstdio>

#include "asdnk/curvature/checks.hpp"
#include "asdnk/nk/system.hpp"
#include "asdnk/sampling.hpp"

using namespace asdnk;

namespace {

void show(const char* name, const NKSolution& s) {
  auto pts = sample_points(s.theta.domain(), nk_chart(), 20, 1);
  double nk1 = 0, nk2 = 0;
  for (const auto& p : pts) {
    nk1 = std::max(nk1, std::abs(residual_nk1(s.theta, s.f).evaluate(p)));
    nk2 = std::max(nk2, std::abs(residual_nk2(s.theta, s.f).evaluate(p)));
  }
  CoFrame cf = nk_coframe(s.theta);
  CurvatureReport r = cartan_report(cf, pts[0]);
  std::printf("%-10s nk1 %8.1e  nk2 %8.1e  max|C| %8.3g  max|C'| %8.1e  max|Phi| %8.3g  R %8.1e\n", name, nk1, nk2,
              r.max_weyl_asd(), r.max_weyl_sd(), r.max_phi(), r.scalar);
}

}  // namespace

int main() {
  auto e = [](const char* s, std::vector<std::string> v) { return parse_expression(s, v); };
  Domain d3 = nk_unit_domain();
  d3.bound("y", 1.0, 2.0);
  show("family 1", example_family(1, {{"A", e("y^2", {"w", "y"})}, {"B", e("w*y", {"w", "y"})}}));
  show("family 2", example_family(2, {{"P", e("w*y + y^2", {"w", "y"})}, {"Q", e("y", {"w", "y"})}}));
  show("family 3", example_family(3, {{"A", e("s^2", {"s"})}}, d3));
  show("family 4", example_family(4, {{"A", e("y^3", {"y"})}}));
  ScalarField th = ScalarField::parse("x^2*y^2", nk_chart(), nk_unit_domain());
  show("x^2 y^2", {th, induced_f(th)});
}
