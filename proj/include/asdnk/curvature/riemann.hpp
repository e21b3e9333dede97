#pragma once

#include <vector>

#include "asdnk/geometry/metric.hpp"
#include "asdnk/linalg.hpp"

namespace asdnk {

// Coordinate curvature at a point, MTW sign conventions:
// R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb},
// Ric_bd = R^a_{bad}, scalar = g^{bd} Ric_bd.
struct RiemannData {
  int n = 0;
  DynMatrix g, ginv;
  std::vector<double> christoffel;  // [a][b][c] = G^a_{bc}
  std::vector<double> riemann;      // [a][b][c][d] = R_{abcd}, all lowered
  DynMatrix ricci;
  double scalar = 0.0;

  double gamma(int a, int b, int c) const { return christoffel[static_cast<std::size_t>((a * n + b) * n + c)]; }
  double R(int a, int b, int c, int d) const {
    return riemann[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)];
  }
  double max_abs_riemann() const {
    double m = 0.0;
    for (double v : riemann) m = std::max(m, std::abs(v));
    return m;
  }
  double max_abs_ricci() const { return ricci.max_abs(); }
  // Ric_ab Ric^ab
  double ricci_square() const {
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) s += ginv(a, c) * ginv(b, d) * ricci(a, b) * ricci(c, d);
    return s;
  }
  // max |R_{a[bcd]}|
  double bianchi_residual() const {
    double m = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) m = std::max(m, std::abs(R(a, b, c, d) + R(a, c, d, b) + R(a, d, b, c)));
    return m;
  }
};

// Connection coefficients G^a_{bc} with first derivatives at a point.
struct ConnectionJet {
  int n = 0;
  std::vector<double> gamma;   // [a][b][c]
  std::vector<double> dgamma;  // [e][a][b][c] = d_e G^a_{bc}

  std::size_t at3(int a, int b, int c) const { return static_cast<std::size_t>((a * n + b) * n + c); }
  std::size_t at4(int e, int a, int b, int c) const {
    return static_cast<std::size_t>(((e * n + a) * n + b) * n + c);
  }
};

inline ConnectionJet levi_civita(const MetricJet& j, const DynMatrix& gi) {
  const int n = j.n;
  ConnectionJet c;
  c.n = n;
  c.gamma.assign(static_cast<std::size_t>(n * n * n), 0.0);
  c.dgamma.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  // first-kind symbols G_{dbc} and their derivatives
  std::vector<double> g1(c.gamma.size()), dg1(c.dgamma.size());
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        g1[c.at3(d, b, cc)] = 0.5 * (j.d(b, d, cc) + j.d(cc, d, b) - j.d(d, b, cc));
        for (int e = 0; e < n; ++e)
          dg1[c.at4(e, d, b, cc)] = 0.5 * (j.dd(e, b, d, cc) + j.dd(e, cc, d, b) - j.dd(e, d, b, cc));
      }
  // d_e g^{ad} = -g^{am} d_e g_{mk} g^{kd}
  std::vector<double> dginv(c.gamma.size(), 0.0);
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d) {
        double s = 0.0;
        for (int m = 0; m < n; ++m)
          for (int k = 0; k < n; ++k) s -= gi(a, m) * j.d(e, m, k) * gi(k, d);
        dginv[c.at3(e, a, d)] = s;
      }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += gi(a, d) * g1[c.at3(d, b, cc)];
        c.gamma[c.at3(a, b, cc)] = s;
        for (int e = 0; e < n; ++e) {
          double t = 0.0;
          for (int d = 0; d < n; ++d) t += dginv[c.at3(e, a, d)] * g1[c.at3(d, b, cc)] + gi(a, d) * dg1[c.at4(e, d, b, cc)];
          c.dgamma[c.at4(e, a, b, cc)] = t;
        }
      }
  return c;
}

// R^a_{bcd} of an arbitrary connection, [a][b][c][d].
inline std::vector<double> riemann_up(const ConnectionJet& c) {
  const int n = c.n;
  std::vector<double> up(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          double s = c.dgamma[c.at4(cc, a, d, b)] - c.dgamma[c.at4(d, a, cc, b)];
          for (int e = 0; e < n; ++e)
            s += c.gamma[c.at3(a, cc, e)] * c.gamma[c.at3(e, d, b)] - c.gamma[c.at3(a, d, e)] * c.gamma[c.at3(e, cc, b)];
          up[c.at4(a, b, cc, d)] = s;
        }
  return up;
}

// Ric_bd = R^a_{bad}; not symmetric for a general connection.
inline DynMatrix ricci_of(const std::vector<double>& up, int n) {
  DynMatrix r(n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += up[static_cast<std::size_t>(((a * n + b) * n + a) * n + d)];
      r(b, d) = s;
    }
  return r;
}

inline RiemannData coordinate_curvature(const MetricField& metric, const double* p) {
  const int n = metric.dim();
  MetricJet j = metric.jet(p, 2);
  RiemannData out;
  out.n = n;
  out.g = j.g;
  out.ginv = j.g.inverse();
  ConnectionJet c = levi_civita(j, out.ginv);
  out.christoffel = c.gamma;
  std::vector<double> up = riemann_up(c);
  out.riemann.assign(up.size(), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += j.g(a, k) * up[c.at4(k, b, cc, d)];
          out.riemann[c.at4(a, b, cc, d)] = s;
        }
  out.ricci = ricci_of(up, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) out.scalar += out.ginv(b, d) * out.ricci(b, d);
  return out;
}

inline RiemannData coordinate_curvature(const MetricField& metric, const std::vector<double>& p) {
  if (p.size() != metric.chart().size()) throw Error("point has wrong dimension");
  return coordinate_curvature(metric, p.data());
}

}  // namespace asdnk
