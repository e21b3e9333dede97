#pragma once

#include <array>
#include <vector>

#include "asdnk/curvature/report.hpp"
#include "asdnk/geometry/metric.hpp"

namespace asdnk {

// Closed-form shortcut constants for the nk coframe, fixed on Th = x y^3
// (kappa1) and Th = x^2 y^2 (kappa2):
//   C_ABCD = kappa1 d_A d_B d_C d_D Th,  C_0'0'0'0' = kappa2 box f.
inline constexpr double kKappa1 = -2.0;
inline constexpr double kKappa2 = -0.5;

// Sigma^{A'B'} = 1/2 eps_AB e^{AA'} ^ e^{BB'} and the unprimed analogue as
// form fields; index = pair_index.
struct SigmaFields {
  std::array<FormField, 3> primed;
  std::array<FormField, 3> unprimed;
};

inline SigmaFields sigma_fields(const CoFrame& cf) {
  SigmaFields s;
  s.primed[0] = wedge(cf.e(0, 0), cf.e(1, 0));
  s.primed[1] = 0.5 * (wedge(cf.e(0, 0), cf.e(1, 1)) + wedge(cf.e(0, 1), cf.e(1, 0)));
  s.primed[2] = wedge(cf.e(0, 1), cf.e(1, 1));
  s.unprimed[0] = wedge(cf.e(0, 0), cf.e(0, 1));
  s.unprimed[1] = 0.5 * (wedge(cf.e(0, 0), cf.e(1, 1)) - wedge(cf.e(0, 1), cf.e(1, 0)));
  s.unprimed[2] = wedge(cf.e(1, 0), cf.e(1, 1));
  return s;
}

inline double max_abs_over(const FormField& f, const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, f.evaluate(p).max_abs());
  return m;
}

// max |C_A'B'C'D'| over the points (Cartan path).
inline double check_asd(const CoFrame& cf, const std::vector<std::vector<double>>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, cartan_report(cf, p).max_weyl_sd());
  return m;
}

inline double check_asd(const std::vector<CurvatureReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, r.max_weyl_sd());
  return m;
}

struct NullKahlerResiduals {
  double d_sigma00 = 0.0;     // max |d Sigma^{0'0'}|
  double d_sigma01 = 0.0;     // max |d Sigma^{0'1'}|
  double ricci_square = 0.0;  // max |Ric_ab Ric^ab|
  double max_ricci = 0.0;     // max |Ric_ab|, to tell null from vacuum

  bool passed(double tol) const { return d_sigma00 < tol && d_sigma01 < tol && ricci_square < tol; }
};

inline NullKahlerResiduals check_null_kahler(const CoFrame& cf, const MetricField& g,
                                              const std::vector<std::vector<double>>& pts) {
  SigmaFields s = sigma_fields(cf);
  NullKahlerResiduals r;
  r.d_sigma00 = max_abs_over(exterior_derivative(s.primed[0]), pts);
  r.d_sigma01 = max_abs_over(exterior_derivative(s.primed[1]), pts);
  for (const auto& p : pts) {
    RiemannData rd = coordinate_curvature(g, p);
    r.ricci_square = std::max(r.ricci_square, std::abs(rd.ricci_square()));
    r.max_ricci = std::max(r.max_ricci, rd.max_abs_ricci());
  }
  return r;
}

inline NullKahlerResiduals check_null_kahler(const CoFrame& cf, const std::vector<std::vector<double>>& pts) {
  return check_null_kahler(cf, metric_from_coframe(cf), pts);
}

}  // namespace asdnk
