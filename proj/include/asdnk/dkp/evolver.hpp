#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/grid.hpp"
#include "asdnk/fields/scalar_field.hpp"
#include "asdnk/sampling.hpp"

namespace asdnk {

class CFLError : public Error {
 public:
  CFLError(double dt, double bound)
      : Error("time step " + format_number(dt) + " violates the CFL bound dt <= " + format_number(bound)),
        bound_(bound) {}
  double bound() const { return bound_; }

 private:
  double bound_;
};

class BlowUpError : public Error {
 public:
  BlowUpError(double t, double umax)
      : Error("solution blew up at t = " + format_number(t) + " (max|u| = " + format_number(umax) + ")") {}
};

// Boundary and closure data for
//   u_t = u u_x + v,  v_x = u_yy + G,  v(x_L, y, t) = closure(y, t),
// with Dirichlet values on the edge of the (x, y) box.
struct DKPProblem {
  std::function<double(double, double, double)> boundary;       // u on the box edge
  std::function<double(double, double, double)> boundary_rate;  // du/dt on the box edge
  std::function<double(double, double)> closure;                // v at x = x_L
  std::function<double(double, double, double)> forcing;        // G; empty means 0

  // Compactly supported data: zero boundary values and closure.
  static std::shared_ptr<const DKPProblem> free() {
    auto p = std::make_shared<DKPProblem>();
    p->boundary = [](double, double, double) { return 0.0; };
    p->boundary_rate = [](double, double, double) { return 0.0; };
    p->closure = [](double, double) { return 0.0; };
    return p;
  }

  // Data from a closed-form u(x, y, t). The forcing G = (u_t - u u_x)_x - u_yy
  // vanishes for exact dKP solutions and makes any other u a manufactured one.
  // If `box` bounds x, y, t and G is zero to rounding at 64 sample points
  // there, the forcing is left out.
  static std::shared_ptr<const DKPProblem> from_reference(const ScalarField& u, double x_left,
                                                          const Domain& box = {}) {
    if (u.backend() != Backend::ClosedForm) throw Error("reference solution must be closed-form");
    const std::vector<std::string> ch{"x", "y", "t"};
    ScalarField ur = u.chart() == ch ? u : u.rechart(ch);
    ScalarField rate = ur.d("t");
    ScalarField flux = rate - ur * ur.d("x");
    ScalarField g = flux.d("x") - ur.d("y", 2);
    auto p = std::make_shared<DKPProblem>();
    auto eval3 = [](ScalarField f) {
      return [f](double x, double y, double t) {
        const double q[3] = {x, y, t};
        return f.evaluate(q);
      };
    };
    p->boundary = eval3(ur);
    p->boundary_rate = eval3(rate);
    p->closure = [flux, x_left](double y, double t) {
      const double q[3] = {x_left, y, t};
      return flux.evaluate(q);
    };
    if (!g.is_zero() && !vanishes(g, ur, box)) p->forcing = eval3(g);
    return p;
  }

 private:
  static bool vanishes(const ScalarField& g, const ScalarField& u, const Domain& box) {
    for (const char* c : {"x", "y", "t"})
      if (!box.interval(c)) return false;
    double gmax = 0.0, scale = 1.0;
    for (const auto& q : sample_points(box, {"x", "y", "t"}, 64, 0x5eed)) {
      gmax = std::max(gmax, std::abs(g.evaluate(q)));
      scale = std::max(scale, std::abs(u.evaluate(q)));
    }
    return gmax <= 1e-12 * scale * scale;
  }
};

// u on an (x, y) grid at time t; x varies fastest (axes ordered y, x).
struct DKPState {
  GridSpec grid;
  double t = 0.0;
  std::vector<double> u;
  std::shared_ptr<const DKPProblem> problem;

  std::size_t nx() const { return grid.axes()[1].count; }
  std::size_t ny() const { return grid.axes()[0].count; }
  double dx() const { return grid.axes()[1].spacing(); }
  double dy() const { return grid.axes()[0].spacing(); }
  double x(std::size_t i) const { return grid.axes()[1].node(i); }
  double y(std::size_t j) const { return grid.axes()[0].node(j); }
  double at(std::size_t i, std::size_t j) const { return u[j * nx() + i]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
};

inline GridSpec dkp_grid(double x0, double x1, std::size_t nx, double y0, double y1, std::size_t ny) {
  return GridSpec({Axis{"y", y0, y1, ny}, Axis{"x", x0, x1, nx}});
}

// State sampled from u0(x, y) at time t.
inline DKPState dkp_initial(const GridSpec& grid, const std::function<double(double, double)>& u0, double t,
                            std::shared_ptr<const DKPProblem> problem) {
  if (grid.dim() != 2 || grid.axes()[0].name != "y" || grid.axes()[1].name != "x")
    throw Error("dKP grid must have axes (y, x)");
  if (!problem) throw Error("dKP state needs boundary data");
  DKPState s{grid, t, std::vector<double>(grid.size()), std::move(problem)};
  for (std::size_t j = 0; j < s.ny(); ++j)
    for (std::size_t i = 0; i < s.nx(); ++i) s.u[j * s.nx() + i] = u0(s.x(i), s.y(j));
  return s;
}

// Advective bound 0.25 min(dx, dy^2/dx) / (1 + max|u|). The d_x^{-1} u_yy
// term alone needs dt <~ 20 dy^2 / L_x for RK4 (measured), independent of
// dx, so that limit is enforced too with a safety factor.
inline constexpr double kDispersiveCFL = 8.0;

inline double cfl_bound(double dx, double dy, double lx, double umax) {
  return std::min(0.25 * std::min(dx, dy * dy / dx) / (1.0 + umax), kDispersiveCFL * dy * dy / lx);
}

inline double cfl_bound(const DKPState& s) {
  const auto& ax = s.grid.axes()[1];
  return cfl_bound(s.dx(), s.dy(), ax.max - ax.min, s.max_abs());
}

namespace detail {

// du/dt at time t for the values u on the state's grid.
inline void dkp_rate(const DKPState& s, const std::vector<double>& u, double t, std::vector<double>& out,
                     std::vector<double>& v) {
  const std::size_t nx = s.nx(), ny = s.ny();
  const double dx = s.dx(), dy = s.dy();
  const DKPProblem& pb = *s.problem;
  auto U = [&](std::size_t i, std::size_t j) { return u[j * nx + i]; };
  v.assign(nx, 0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = s.y(j);
    const bool edge_row = j == 0 || j + 1 == ny;
    if (!edge_row) {
      // v = closure + trapezoid sum of u_yy + G along x
      auto q = [&](std::size_t i) {
        double r = (U(i, j + 1) - 2.0 * U(i, j) + U(i, j - 1)) / (dy * dy);
        if (pb.forcing) r += pb.forcing(s.x(i), y, t);
        return r;
      };
      v[0] = pb.closure(y, t);
      double prev = q(0);
      for (std::size_t i = 1; i < nx; ++i) {
        double cur = q(i);
        v[i] = v[i - 1] + 0.5 * dx * (prev + cur);
        prev = cur;
      }
    }
    for (std::size_t i = 0; i < nx; ++i) {
      double& r = out[j * nx + i];
      if (edge_row || i == 0 || i + 1 == nx) {
        r = pb.boundary_rate(s.x(i), y, t);
        continue;
      }
      r = U(i, j) * (U(i + 1, j) - U(i - 1, j)) / (2.0 * dx) + v[i];
    }
  }
}

}  // namespace detail

inline void write_state_csv(std::ostream& os, const DKPState& s) { write_csv(os, s.grid, s.u); }

struct EvolveOptions {
  std::size_t record_every = 0;   // 0: only the final state
  double blowup_factor = 1e3;     // max|u| > factor (1 + max|u0|) stops the run
};

// Classical RK4 in time; returns the recorded states, the last one being
// the state after `steps` steps.
inline std::vector<DKPState> dkp_evolve(const DKPState& s0, double dt, std::size_t steps, EvolveOptions opt = {}) {
  if (!s0.problem) throw Error("dKP state needs boundary data");
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const double limit = opt.blowup_factor * (1.0 + s0.max_abs());
  std::vector<DKPState> out;
  DKPState s = s0;
  const std::size_t n = s.u.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), scratch;
  for (std::size_t step = 0; step < steps; ++step) {
    double bound = cfl_bound(s);
    if (dt > bound * (1.0 + 1e-12)) throw CFLError(dt, bound);
    const double t = s.t;
    detail::dkp_rate(s, s.u, t, k1, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.u[i] + 0.5 * dt * k1[i];
    detail::dkp_rate(s, tmp, t + 0.5 * dt, k2, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.u[i] + 0.5 * dt * k2[i];
    detail::dkp_rate(s, tmp, t + 0.5 * dt, k3, scratch);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s.u[i] + dt * k3[i];
    detail::dkp_rate(s, tmp, t + dt, k4, scratch);
    for (std::size_t i = 0; i < n; ++i) s.u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s.t = s0.t + static_cast<double>(step + 1) * dt;
    double m = 0.0;
    for (double v : s.u) {
      if (!std::isfinite(v)) throw BlowUpError(s.t, v);
      m = std::max(m, std::abs(v));
    }
    if (m > limit) throw BlowUpError(s.t, m);
    if (opt.record_every && (step + 1) % opt.record_every == 0 && step + 1 != steps) out.push_back(s);
  }
  out.push_back(s);
  return out;
}

// Smallest step count whose step duration / steps meets the CFL bound
// as long as max|u| stays below umax.
inline std::size_t dkp_steps_for(const DKPState& s, double duration, double umax) {
  const auto& ax = s.grid.axes()[1];
  const double bound = cfl_bound(s.dx(), s.dy(), ax.max - ax.min, umax);
  return static_cast<std::size_t>(std::ceil(duration / bound));
}

// |a - b|_2 / |b|_2 over grid nodes.
inline double relative_l2(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error("size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

struct ConvergenceStudy {
  std::vector<std::size_t> cells;   // cells per axis of each run
  std::vector<double> differences;  // RMS |u_N - u_2N| on the coarse nodes
  std::vector<double> errors;       // RMS |u_N - u_ref| against the reference
  double order = 0.0;               // log2 of the last difference ratio
};

// Self-convergence on [x0,x1] x [y0,y1] up to time T against the closed-form
// u_ref, which also supplies the boundary data and the forcing.
inline ConvergenceStudy dkp_convergence(const ScalarField& u_ref, double x0, double x1, double y0, double y1,
                                        double T, std::vector<std::size_t> cells, double umax) {
  if (cells.size() < 3) throw Error("self-convergence needs at least three resolutions");
  Domain box;
  box.bound("x", x0, x1).bound("y", y0, y1).bound("t", 0.0, T);
  auto problem = DKPProblem::from_reference(u_ref, x0, box);
  ConvergenceStudy st;
  st.cells = cells;
  std::vector<DKPState> finals;
  for (std::size_t c : cells) {
    DKPState s0 = dkp_initial(dkp_grid(x0, x1, c + 1, y0, y1, c + 1), [&](double x, double y) {
      const double q[3] = {x, y, 0.0};
      return u_ref.evaluate(q);
    }, 0.0, problem);
    std::size_t steps = dkp_steps_for(s0, T, umax);
    finals.push_back(dkp_evolve(s0, T / static_cast<double>(steps), steps).back());
    const DKPState& f = finals.back();
    double e = 0.0;
    for (std::size_t j = 0; j < f.ny(); ++j)
      for (std::size_t i = 0; i < f.nx(); ++i) {
        const double q[3] = {f.x(i), f.y(j), f.t};
        e += std::pow(f.at(i, j) - u_ref.evaluate(q), 2);
      }
    st.errors.push_back(std::sqrt(e / static_cast<double>(f.u.size())));
  }
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const DKPState &a = finals[k], &b = finals[k + 1];
    const std::size_t r = b.nx() / (a.nx() - 1);
    if (r * (a.nx() - 1) + 1 != b.nx()) throw Error("resolutions must nest");
    double d = 0.0;
    for (std::size_t j = 0; j < a.ny(); ++j)
      for (std::size_t i = 0; i < a.nx(); ++i) d += std::pow(a.at(i, j) - b.at(i * r, j * r), 2);
    st.differences.push_back(std::sqrt(d / static_cast<double>(a.u.size())));
  }
  const std::size_t m = st.differences.size();
  const double ratio = static_cast<double>(cells[m]) / static_cast<double>(cells[m - 1]);
  st.order = std::log(st.differences[m - 2] / st.differences[m - 1]) / std::log(ratio);
  return st;
}

}  // namespace asdnk
