#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asdnk/cli/config.hpp"
#include "asdnk/curvature/checks.hpp"
#include "asdnk/dkp/pipeline.hpp"
#include "asdnk/fields/parser.hpp"
#include "asdnk/nk/system.hpp"
#include "json.hpp"

namespace asdnk::cli {

// A fixture with its expressions parsed. Geometry is built inside checks,
// so constructor errors surface as failed checks rather than config errors.
struct Fixture {
  FixtureSpec spec;
  Domain domain;
  // nk kinds
  ScalarField theta, f;
  // dkp and ew kinds
  ScalarField H, W, u;
};

namespace detail {

inline Domain fixture_domain(const FixtureSpec& s, Domain d) {
  for (const auto& [c, iv] : s.domain) d.bound(c, iv.first, iv.second);
  return d;
}

inline Domain default_dkp_domain() {
  Domain d;
  d.bound("x", -1, 1).bound("y", -1, 1).bound("t", -1, 0.5).bound("z", -1, 1);
  return d;
}

}  // namespace detail

inline bool check_applies(const std::string& kind, const std::string& check) {
  static const std::vector<std::string> nk{"nk1", "nk2", "asd", "scalar", "ricci_square", "ricci", "d_sigma", "lax",
                                           "two_path"};
  static const std::vector<std::string> dkp{"heqn", "lindkp", "monopole", "ew", "asd", "scalar", "ricci",
                                            "ricci_square", "jones_tod", "d_sigma", "sigma_wedge", "sigma11",
                                            "sigma11_corrected", "hk_ricci", "two_path"};
  const auto& list = kind == "dkp" ? dkp : nk;
  if (kind == "ew") return check == "ew";
  return std::find(list.begin(), list.end(), check) != list.end();
}

inline Fixture build_fixture(const FixtureSpec& s, const std::string& source) {
  const std::string at = source + ":" + std::to_string(s.line) + ": fixture '" + s.id + "'";
  auto need = [&](const char* key) -> const std::string& {
    const std::string* v = s.get(key);
    if (!v) throw ConfigError(at + " needs key '" + key + "'");
    return *v;
  };
  auto parse = [&](const char* key, const std::string& text, const std::vector<std::string>& vars) {
    try {
      return parse_expression(text, vars);
    } catch (const Error& e) {
      throw ConfigError(source + ":" + std::to_string(s.line_of(key)) + ": fixture '" + s.id + "', key '" + key +
                        "': " + e.what());
    }
  };
  for (const auto* list : {&s.checks, &s.controls})
    for (const auto& c : *list)
      if (!check_applies(s.kind, c))
        throw ConfigError(source + ":" + std::to_string(s.line_of(list == &s.checks ? "checks" : "controls")) +
                          ": fixture '" + s.id + "': check '" + c + "' does not apply to " + s.kind + " fixtures");
  Fixture fx;
  fx.spec = s;
  if (s.kind == "nk_family") {
    int kind = 0;
    try {
      kind = std::stoi(need("family"));
    } catch (const std::logic_error&) {
      throw ConfigError(at + ": family must be an integer");
    }
    std::vector<std::string> vars = kind == 3 ? std::vector<std::string>{"s"}
                                    : kind == 4 ? std::vector<std::string>{"y"}
                                                : std::vector<std::string>{"w", "y"};
    std::map<std::string, Expr> params;
    for (const char* key : {"A", "B", "P", "Q"})
      if (const std::string* v = s.get(key)) params[key] = parse(key, *v, vars);
    Domain base = nk_unit_domain();
    if (kind == 3) base.bound("y", 1.0, 2.0);
    fx.domain = detail::fixture_domain(s, base);
    try {
      NKSolution sol = example_family(kind, params, fx.domain);
      fx.theta = sol.theta;
      fx.f = sol.f;
    } catch (const Error& e) {
      throw ConfigError(at + ": " + e.what());
    }
  } else if (s.kind == "nk") {
    fx.domain = detail::fixture_domain(s, nk_unit_domain());
    fx.theta = ScalarField::closed_form(parse("theta", need("theta"), nk_chart()), nk_chart(), fx.domain);
    const std::string* fv = s.get("f");
    fx.f = !fv || *fv == "induced" ? induced_f(fx.theta)
                                   : ScalarField::closed_form(parse("f", *fv, nk_chart()), nk_chart(), fx.domain);
  } else if (s.kind == "dkp") {
    fx.domain = detail::fixture_domain(s, detail::default_dkp_domain());
    fx.H = ScalarField::closed_form(parse("H", need("H"), ew_chart()), ew_chart(), fx.domain);
    if (const std::string* sym = s.get("W_symmetry")) {
      auto parts = cli::detail::split_list(*sym);
      if (parts.size() != 4) throw ConfigError(at + ": W_symmetry wants four numbers a, b, c, e");
      double k[4];
      for (int i = 0; i < 4; ++i) k[i] = cli::detail::parse_double(parts[static_cast<std::size_t>(i)], at + ", key 'W_symmetry'");
      fx.W = symmetry_W(fx.H, k[0], k[1], k[2], k[3]);
    } else {
      fx.W = ScalarField::closed_form(parse("W", need("W"), ew_chart()), ew_chart(), fx.domain);
    }
    fx.u = fx.H.d("x");
  } else {
    Domain d;
    d.bound("x", -1, 1).bound("y", -1, 1).bound("t", -1, 0.5);
    fx.domain = detail::fixture_domain(s, d);
    fx.u = ScalarField::closed_form(parse("u", need("u"), ew_chart()), ew_chart(), fx.domain);
  }
  return fx;
}

struct CheckResult {
  std::string fixture;
  std::string check;
  bool control = false;  // negative control: passes when residual > threshold
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string error;
  double seconds = 0.0;
};

struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  std::vector<CheckResult> results;

  bool passed() const {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
  }
};

namespace detail {

struct Samples {
  std::vector<std::vector<double>> p4, p3;
};

inline double nk_check(const std::string& c, const Fixture& fx, const Samples& s) {
  const auto& pts = s.p4;
  if (c == "nk1") return asdnk::detail::max_abs_over(residual_nk1(fx.theta, fx.f), pts);
  if (c == "nk2") return asdnk::detail::max_abs_over(residual_nk2(fx.theta, fx.f), pts);
  CoFrame cf = nk_coframe(fx.theta);
  if (c == "asd") return check_asd(cf, pts);
  if (c == "d_sigma") {
    SigmaFields sf = sigma_fields(cf);
    return std::max(max_abs_over(exterior_derivative(sf.primed[0]), pts),
                    max_abs_over(exterior_derivative(sf.primed[1]), pts));
  }
  if (c == "lax") {
    LaxFields L = lax_fields(fx.theta, fx.f);
    double m = 0.0;
    for (const auto& p : pts)
      for (double l : {-2.0, -0.7, 0.4, 1.3, 2.0}) m = std::max(m, max_abs(lax_commutator(L, p.data(), l)));
    return m;
  }
  MetricField g = nk_metric(fx.theta);
  double m = 0.0;
  for (const auto& p : pts) {
    if (c == "two_path") {
      m = std::max(m, report_difference(oracle_report(g, cf.value(p.data()), p.data()), cartan_report(cf, p)));
      continue;
    }
    RiemannData rd = coordinate_curvature(g, p);
    if (c == "scalar") m = std::max(m, std::abs(rd.scalar));
    else if (c == "ricci_square") m = std::max(m, std::abs(rd.ricci_square()));
    else if (c == "ricci") m = std::max(m, rd.max_abs_ricci());
    else throw ConfigError("check '" + c + "' does not apply to nk fixtures");
  }
  return m;
}

inline double dkp_check(const std::string& c, const Fixture& fx, const Samples& s) {
  using asdnk::detail::max_abs_over;
  if (c == "heqn") return max_abs_over(residual_heqn(fx.H), s.p3);
  if (c == "lindkp") return max_abs_over(residual_lindkp(fx.H, fx.W), s.p3);
  if (c == "ew") return ew_residual(ew_from_u(fx.u), s.p3);
  if (c == "monopole") return monopole_residual(ew_from_u(fx.u), monopole_from_W(fx.W), s.p3);
  if (c == "d_sigma" || c == "sigma_wedge" || c == "sigma11" || c == "sigma11_corrected") {
    SDFormReport r = sd_form_report(fx.H, fx.W, s.p4);
    if (c == "d_sigma") return std::max(r.d_sigma00, r.d_sigma01);
    if (c == "sigma_wedge") return r.wedge_identity;
    if (c == "sigma11") return r.sigma11_printed;
    return r.sigma11_corrected;
  }
  if (c == "asd") return check_asd(dkp_coframe(fx.H, fx.W), s.p4);
  if (c == "jones_tod") {
    EWStructure rec = jones_tod_reduce(build_metric(fx.H, fx.W));
    EWStructure ew = ew_from_u(fx.u);
    ScalarField wx = fx.W.d("x");
    ScalarField lnw2 = ScalarField::closed_form(log(wx.expr() * wx.expr()), ew_chart(), fx.domain);
    FormField nu_expect = ew.nu + exterior_derivative(FormField::scalar(lnw2));
    double m = max_abs_over(rec.nu - nu_expect, s.p3);
    for (const auto& p : s.p3) {
      DynMatrix a = rec.h.value(p.data()), b = ew.h.value(p.data());
      const double k = wx.evaluate(p);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a(i, j) + k * k * b(i, j)));
    }
    return m;
  }
  if (c == "two_path") {
    CoFrame cf = dkp_coframe(fx.H, fx.W);
    MetricField g = build_metric(fx.H, fx.W);
    double m = 0.0;
    for (const auto& p : s.p4)
      m = std::max(m, report_difference(oracle_report(g, cf.value(p.data()), p.data()), cartan_report(cf, p)));
    return m;
  }
  MetricField g = c == "hk_ricci" ? hyperkahler_specialize(fx.H) : build_metric(fx.H, fx.W);
  double m = 0.0;
  for (const auto& p : s.p4) {
    RiemannData rd = coordinate_curvature(g, p);
    if (c == "scalar") m = std::max(m, std::abs(rd.scalar));
    else if (c == "ricci" || c == "hk_ricci") m = std::max(m, rd.max_abs_ricci());
    else if (c == "ricci_square") m = std::max(m, std::abs(rd.ricci_square()));
    else throw ConfigError("check '" + c + "' does not apply to dkp fixtures");
  }
  return m;
}

inline double run_check(const std::string& c, const Fixture& fx, const Samples& s) {
  const std::string& k = fx.spec.kind;
  if (k == "nk" || k == "nk_family") return nk_check(c, fx, s);
  if (k == "dkp") return dkp_check(c, fx, s);
  if (c != "ew") throw ConfigError("check '" + c + "' does not apply to ew fixtures");
  return ew_residual(ew_from_u(fx.u), s.p3);
}

inline Samples fixture_samples(const Fixture& fx, std::size_t n, std::uint64_t seed) {
  Samples s;
  const std::string& k = fx.spec.kind;
  if (k == "nk" || k == "nk_family") s.p4 = sample_points(fx.domain, nk_chart(), n, seed);
  if (k == "dkp") s.p4 = sample_points(fx.domain, dkp_chart(), n, seed);
  if (k == "dkp" || k == "ew") s.p3 = sample_points(fx.domain, ew_chart(), n, seed);
  return s;
}

inline std::vector<CheckResult> run_fixture(const Fixture& fx, const CheckConfig& cfg, std::uint64_t seed,
                                            double scale) {
  std::vector<CheckResult> out;
  Samples s = fixture_samples(fx, cfg.samples, seed);
  auto one = [&](const std::string& c, bool control) {
    CheckResult r;
    r.fixture = fx.spec.id;
    r.check = c;
    r.control = control;
    r.threshold = (control ? cfg.control(c) : cfg.tolerance(c)) * scale;
    auto t0 = std::chrono::steady_clock::now();
    try {
      r.residual = run_check(c, fx, s);
      r.passed = control ? r.residual > r.threshold : r.residual < r.threshold;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r.error = e.what();
      r.passed = false;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(r);
  };
  for (const auto& c : fx.spec.checks) one(c, false);
  for (const auto& c : fx.spec.controls) one(c, true);
  return out;
}

}  // namespace detail

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool serial = false;
  double tolerance_scale = 1.0;
};

// Runs every fixture; results are ordered by fixture id, then by the
// order of checks and controls in the config.
inline SuiteReport run_suite(const CheckConfig& cfg, const RunOptions& opt = {}) {
  if (!(opt.tolerance_scale > 0)) throw ConfigError("tolerance scale must be > 0");
  SuiteReport rep;
  rep.name = cfg.name;
  rep.seed = opt.seed.value_or(cfg.seed);
  rep.tolerance_scale = opt.tolerance_scale;
  std::vector<Fixture> fixtures;
  for (const auto& s : cfg.fixtures) fixtures.push_back(build_fixture(s, cfg.source));
  std::sort(fixtures.begin(), fixtures.end(), [](const Fixture& a, const Fixture& b) { return a.spec.id < b.spec.id; });
  std::vector<std::vector<CheckResult>> parts(fixtures.size());
  if (opt.serial) {
    for (std::size_t i = 0; i < fixtures.size(); ++i)
      parts[i] = detail::run_fixture(fixtures[i], cfg, rep.seed, opt.tolerance_scale);
  } else {
    std::vector<std::future<std::vector<CheckResult>>> jobs;
    for (const auto& fx : fixtures)
      jobs.push_back(std::async(std::launch::async, [&cfg, &fx, &rep, &opt] {
        return detail::run_fixture(fx, cfg, rep.seed, opt.tolerance_scale);
      }));
    for (std::size_t i = 0; i < jobs.size(); ++i) parts[i] = jobs[i].get();
  }
  for (auto& p : parts) rep.results.insert(rep.results.end(), p.begin(), p.end());
  return rep;
}

// schema 1. Wall times are left out so that reports are reproducible;
// see timings_json.
inline nlohmann::ordered_json report_json(const SuiteReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["suite"] = r.name;
  j["seed"] = r.seed;
  j["tolerance_scale"] = r.tolerance_scale;
  j["passed"] = r.passed();
  std::size_t failed = 0;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.results) {
    nlohmann::ordered_json e;
    e["fixture"] = c.fixture;
    e["check"] = c.check;
    e["mode"] = c.control ? "control" : "check";
    e["residual"] = c.residual;
    e[c.control ? "threshold" : "tolerance"] = c.threshold;
    e["passed"] = c.passed;
    if (!c.error.empty()) e["error"] = c.error;
    if (!c.passed) ++failed;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["summary"] = {{"total", r.results.size()}, {"passed", r.results.size() - failed}, {"failed", failed}};
  return j;
}

inline nlohmann::ordered_json timings_json(const SuiteReport& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& c : r.results) j.push_back({{"fixture", c.fixture}, {"check", c.check}, {"seconds", c.seconds}});
  return j;
}

// ---- export -------------------------------------------------------------

inline const std::vector<std::string>& export_quantities() {
  static const std::vector<std::string> q{"metric", "curvature", "sigma", "ew"};
  return q;
}

// Named node arrays of one exported quantity over `grid`. Grid axes name
// chart coordinates; the other coordinates sit at `fixed` or, if absent,
// at the midpoint of the fixture domain.
inline std::vector<std::pair<std::string, std::vector<double>>> export_quantity(
    const Fixture& fx, const std::string& quantity, const GridSpec& grid, const std::map<std::string, double>& fixed) {
  if (std::find(export_quantities().begin(), export_quantities().end(), quantity) == export_quantities().end())
    throw ConfigError("unknown export quantity '" + quantity + "' (metric, curvature, sigma, ew)");
  const std::string& k = fx.spec.kind;
  const bool nk = k == "nk" || k == "nk_family";
  const bool four_d = quantity != "ew" && (nk || k == "dkp");
  if (!four_d && quantity != "ew") throw ConfigError("quantity '" + quantity + "' needs an nk or dkp fixture");
  if (quantity == "ew" && nk) throw ConfigError("quantity 'ew' needs a dkp or ew fixture");
  const std::vector<std::string>& chart = four_d ? (nk ? nk_chart() : dkp_chart()) : ew_chart();
  for (const auto& n : grid.names())
    if (std::find(chart.begin(), chart.end(), n) == chart.end())
      throw ConfigError("grid axis '" + n + "' is not a coordinate of the fixture chart");
  std::vector<double> base(chart.size());
  for (std::size_t i = 0; i < chart.size(); ++i) {
    if (auto it = fixed.find(chart[i]); it != fixed.end()) base[i] = it->second;
    else if (auto iv = fx.domain.interval(chart[i])) base[i] = 0.5 * (iv->lo + iv->hi);
  }
  std::vector<int> axis_of;
  for (const auto& n : grid.names())
    axis_of.push_back(static_cast<int>(std::find(chart.begin(), chart.end(), n) - chart.begin()));

  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::vector<std::function<std::vector<double>(const double*)>> per_node;
  std::vector<std::string> names;
  const int n = static_cast<int>(chart.size());
  if (quantity == "metric" || quantity == "ew") {
    MetricField g = quantity == "ew" ? ew_from_u(fx.u).h : nk ? nk_metric(fx.theta) : build_metric(fx.H, fx.W);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) names.push_back((quantity == "ew" ? "ew_h_" : "metric_g_") + chart[static_cast<std::size_t>(i)] + "_" + chart[static_cast<std::size_t>(j)]);
    std::vector<std::string> nu_names;
    FormField nu;
    if (quantity == "ew") {
      nu = ew_from_u(fx.u).nu;
      for (const auto& c : chart) names.push_back("ew_nu_" + c);
    }
    per_node.push_back([g, nu, n, quantity](const double* p) {
      std::vector<double> v;
      DynMatrix m = g.value(p);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) v.push_back(m(i, j));
      if (quantity == "ew") {
        FormValue f = nu.evaluate(p);
        v.insert(v.end(), f.comps.begin(), f.comps.end());
      }
      return v;
    });
  } else if (quantity == "curvature") {
    CoFrame cf = nk ? nk_coframe(fx.theta) : dkp_coframe(fx.H, fx.W);
    CurvatureReport probe;
    nlohmann::json keys = to_json(probe);
    for (auto it = keys.begin(); it != keys.end(); ++it)
      if (it.value().is_number()) names.push_back("curvature_" + it.key());
    per_node.push_back([cf](const double* p) {
      nlohmann::json j = to_json(cartan_report(cf, p));
      std::vector<double> v;
      for (auto it = j.begin(); it != j.end(); ++it)
        if (it.value().is_number()) v.push_back(it.value().get<double>());
      return v;
    });
  } else {
    CoFrame cf = nk ? nk_coframe(fx.theta) : dkp_coframe(fx.H, fx.W);
    SigmaFields sf = sigma_fields(cf);
    static const char* pairs[3] = {"00", "01", "11"};
    auto combos = combinations(n, 2);
    for (const char* side : {"primed", "unprimed"})
      for (const char* pr : pairs)
        for (const auto& c : combos)
          names.push_back(std::string("sigma_") + side + pr + "_" + chart[static_cast<std::size_t>(c[0])] + "_" + chart[static_cast<std::size_t>(c[1])]);
    per_node.push_back([sf](const double* p) {
      std::vector<double> v;
      for (const auto* side : {&sf.primed, &sf.unprimed})
        for (const auto& form : *side) {
          FormValue f = form.evaluate(p);
          v.insert(v.end(), f.comps.begin(), f.comps.end());
        }
      return v;
    });
  }
  for (const auto& nm : names) out.push_back({nm, std::vector<double>(grid.size())});
  std::vector<double> x(grid.dim()), p = base;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    grid.node(node, x.data());
    for (std::size_t a = 0; a < axis_of.size(); ++a) p[static_cast<std::size_t>(axis_of[a])] = x[a];
    std::vector<double> v = per_node[0](p.data());
    for (std::size_t q = 0; q < v.size(); ++q) out[q].second[node] = v[q];
  }
  return out;
}

}  // namespace asdnk::cli
