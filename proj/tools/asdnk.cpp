// asdnk: batch driver for the check suite, the dKP evolver and CSV exports.
//
//   asdnk check  --config FILE [--seed N] [--serial] [--out-dir D] [--tolerance-scale S]
//   asdnk export --config FILE --fixture ID --quantity Q --grid SPEC [--at c=v,...] [--out-dir D]
//   asdnk evolve --grid SPEC [--mode free|reference|manufactured] [--u0 EXPR | --reference EXPR] ...
//
// Exit codes: 0 pass, 1 check failure, 2 usage or config error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "asdnk/cli/suite.hpp"
#include "asdnk/dkp/evolver.hpp"

namespace fs = std::filesystem;
using namespace asdnk;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool serial = false;
  std::string out_dir;
  double tolerance_scale = 1.0;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

fs::path out_path(const Globals& g, const std::string& name) {
  fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  os << text;
}

int run_check(const Globals& g) {
  if (g.config.empty()) throw UsageError("check needs --config");
  cli::CheckConfig cfg = cli::load_config(g.config);
  cli::RunOptions opt;
  opt.seed = g.seed;
  opt.serial = g.serial;
  opt.tolerance_scale = g.tolerance_scale;
  cli::SuiteReport rep = cli::run_suite(cfg, opt);
  const std::string json = cli::report_json(rep).dump(2) + "\n";
  std::ostream& human = g.out_dir.empty() ? std::cerr : std::cout;
  if (g.out_dir.empty()) {
    std::cout << json;
  } else {
    write_file(out_path(g, "report.json"), json);
    write_file(out_path(g, "timings.json"), cli::timings_json(rep).dump(2) + "\n");
  }
  std::size_t failed = 0;
  for (const auto& r : rep.results) {
    if (r.passed) continue;
    ++failed;
    human << "FAIL " << r.fixture << "/" << r.check << (r.control ? " (control)" : "") << ": residual "
          << std::setprecision(3) << r.residual << (r.control ? " <= " : " >= ") << r.threshold;
    if (!r.error.empty()) human << " [" << r.error << "]";
    human << "\n";
  }
  human << rep.name << ": " << rep.results.size() - failed << "/" << rep.results.size() << " checks passed\n";
  return failed ? 1 : 0;
}

std::map<std::string, double> parse_at(const std::string& text) {
  std::map<std::string, double> out;
  for (const auto& part : cli::detail::split_list(text)) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("--at wants coord=value, got '" + part + "'");
    out[cli::detail::trim(part.substr(0, eq))] = cli::detail::parse_double(cli::detail::trim(part.substr(eq + 1)), "--at");
  }
  return out;
}

int run_export(const Globals& g, const std::string& fixture, const std::string& quantity, const std::string& grid,
               const std::string& at) {
  if (g.config.empty()) throw UsageError("export needs --config");
  if (fixture.empty() || grid.empty()) throw UsageError("export needs --fixture and --grid");
  cli::CheckConfig cfg = cli::load_config(g.config);
  cli::Fixture fx = cli::build_fixture(cfg.fixture(fixture), cfg.source);
  GridSpec spec = [&] {
    try {
      return GridSpec::parse(grid);
    } catch (const Error& e) {
      throw UsageError(std::string("--grid: ") + e.what());
    }
  }();
  auto columns = cli::export_quantity(fx, quantity, spec, parse_at(at));
  for (const auto& [name, values] : columns) {
    std::ostringstream os;
    write_csv(os, spec, values);
    fs::path p = out_path(g, fixture + "_" + name + ".csv");
    write_file(p, os.str());
  }
  std::cout << "wrote " << columns.size() << " files for " << fixture << "/" << quantity << "\n";
  return 0;
}

struct EvolveArgs {
  std::string mode = "free";
  std::string grid;
  std::string u0 = "0";
  std::string reference;
  double dt = 0.0;
  std::size_t steps = 0;
  double duration = 0.0;
  double umax = 0.0;
  std::size_t record_every = 0;
  std::vector<std::size_t> cells{64, 128, 256};
};

GridSpec evolve_grid(const std::string& text) {
  if (text.empty()) throw UsageError("evolve needs --grid");
  GridSpec g = GridSpec::parse(text);
  const Axis *ax = nullptr, *ay = nullptr;
  for (const auto& a : g.axes()) {
    if (a.name == "x") ax = &a;
    else if (a.name == "y") ay = &a;
    else throw UsageError("evolve grid axes must be x and y, got '" + a.name + "'");
  }
  if (!ax || !ay || g.dim() != 2) throw UsageError("evolve grid needs one x and one y axis");
  return dkp_grid(ax->min, ax->max, ax->count, ay->min, ay->max, ay->count);
}

void write_states(const Globals& g, const std::vector<DKPState>& states) {
  for (std::size_t k = 0; k < states.size(); ++k) {
    std::ostringstream name;
    name << "u_" << std::setw(4) << std::setfill('0') << k << ".csv";
    std::ostringstream os;
    os << "# t = " << format_g17(states[k].t) << "\n";
    write_state_csv(os, states[k]);
    write_file(out_path(g, name.str()), os.str());
  }
}

int run_evolve(const Globals& g, const EvolveArgs& a) {
  const std::vector<std::string> xyt{"x", "y", "t"};
  if (a.mode == "manufactured") {
    if (a.reference.empty()) throw UsageError("manufactured mode needs --reference");
    if (!(a.duration > 0)) throw UsageError("manufactured mode needs --T > 0");
    GridSpec grid = evolve_grid(a.grid);
    const Axis &ay = grid.axes()[0], &ax = grid.axes()[1];
    ScalarField u = ScalarField::parse(a.reference, xyt);
    ConvergenceStudy st = dkp_convergence(u, ax.min, ax.max, ay.min, ay.max, a.duration, a.cells,
                                          a.umax > 0 ? a.umax : 1.0);
    std::ostringstream os;
    os << "# cells,error_vs_reference,difference_to_next\n";
    for (std::size_t k = 0; k < st.cells.size(); ++k) {
      os << st.cells[k] << "," << format_g17(st.errors[k]) << ",";
      if (k < st.differences.size()) os << format_g17(st.differences[k]);
      os << "\n";
    }
    os << "# order " << format_g17(st.order) << "\n";
    write_file(out_path(g, "convergence.csv"), os.str());
    std::cout << os.str();
    return 0;
  }
  GridSpec grid = evolve_grid(a.grid);
  DKPState s0;
  std::optional<ScalarField> ref;
  if (a.mode == "free") {
    ScalarField u0 = ScalarField::parse(a.u0, {"x", "y"});
    s0 = dkp_initial(grid, [&](double x, double y) {
      const double q[2] = {x, y};
      return u0.evaluate(q);
    }, 0.0, DKPProblem::free());
  } else if (a.mode == "reference") {
    if (a.reference.empty()) throw UsageError("reference mode needs --reference");
    ref = ScalarField::parse(a.reference, xyt);
    const Axis &ay = grid.axes()[0], &ax = grid.axes()[1];
    double T = a.duration > 0 ? a.duration : a.dt * static_cast<double>(a.steps);
    Domain box;
    box.bound("x", ax.min, ax.max).bound("y", ay.min, ay.max).bound("t", 0.0, std::max(T, 1e-9));
    s0 = dkp_initial(grid, [&](double x, double y) {
      const double q[3] = {x, y, 0.0};
      return ref->evaluate(q);
    }, 0.0, DKPProblem::from_reference(*ref, ax.min, box));
  } else {
    throw UsageError("unknown evolve mode '" + a.mode + "' (free, reference, manufactured)");
  }
  double dt = a.dt;
  std::size_t steps = a.steps;
  if (a.duration > 0 && steps == 0) {
    steps = dt > 0 ? static_cast<std::size_t>(std::ceil(a.duration / dt - 1e-9))
                   : dkp_steps_for(s0, a.duration, a.umax > 0 ? a.umax : 2.0 * s0.max_abs());
    dt = a.duration / static_cast<double>(steps);
  }
  if (!(dt > 0) || steps == 0) throw UsageError("evolve needs --dt and --steps, or --T");
  auto states = dkp_evolve(s0, dt, steps, {a.record_every});
  write_states(g, states);
  const DKPState& f = states.back();
  std::cout << "t = " << format_g17(f.t) << ", max|u| = " << format_g17(f.max_abs()) << ", " << states.size()
            << " states written\n";
  if (ref) {
    std::vector<double> exact(f.u.size());
    for (std::size_t j = 0; j < f.ny(); ++j)
      for (std::size_t i = 0; i < f.nx(); ++i) {
        const double q[3] = {f.x(i), f.y(j), f.t};
        exact[j * f.nx() + i] = ref->evaluate(q);
      }
    std::cout << "relative L2 error vs reference: " << format_g17(relative_l2(f.u, exact)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ASD null-Kahler and dKP toolkit"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "config file");
    sub->add_option("--seed", g.seed, "sampling seed (overrides the config)");
    sub->add_flag("--serial", g.serial, "run fixtures one at a time");
    sub->add_option("--out-dir", g.out_dir, "output directory");
    sub->add_option("--tolerance-scale", g.tolerance_scale, "multiply every tolerance and control threshold");
  };
  CLI::App* check = app.add_subcommand("check", "run the check suite of a config");
  add_globals(check);

  CLI::App* exp = app.add_subcommand("export", "write a fixture quantity on a grid as CSV");
  add_globals(exp);
  std::string fixture, quantity, grid, at;
  exp->add_option("--fixture", fixture, "fixture id")->required();
  exp->add_option("--quantity", quantity, "metric, curvature, sigma or ew")->required();
  exp->add_option("--grid", grid, "axes, e.g. x:-1:1:17,y:-1:1:17")->required();
  exp->add_option("--at", at, "fixed coordinates, e.g. w=0.1,z=0.2");

  CLI::App* evo = app.add_subcommand("evolve", "evolve dKP data on a grid");
  add_globals(evo);
  EvolveArgs ea;
  evo->add_option("--mode", ea.mode, "free, reference or manufactured");
  evo->add_option("--grid", ea.grid, "x:x0:x1:nx,y:y0:y1:ny")->required();
  evo->add_option("--u0", ea.u0, "initial data u(x, y) for free mode");
  evo->add_option("--reference", ea.reference, "closed-form u(x, y, t)");
  evo->add_option("--dt", ea.dt, "time step");
  evo->add_option("--steps", ea.steps, "number of steps");
  evo->add_option("--T", ea.duration, "final time");
  evo->add_option("--umax", ea.umax, "bound on |u| used to pick the step (default 2 max|u0|)");
  evo->add_option("--record-every", ea.record_every, "write every n-th state");
  evo->add_option("--cells", ea.cells, "cells per axis for the convergence study")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*check) return run_check(g);
    if (*exp) return run_export(g, fixture, quantity, grid, at);
    return run_evolve(g, ea);
  } catch (const CFLError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
