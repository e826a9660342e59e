#include "fockflow/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fockflow/artifacts.hpp"
#include "fockflow/config.hpp"
#include "fockflow/decision.hpp"
#include "fockflow/error.hpp"

namespace fockflow {

namespace {

struct Flags {
  std::string poly, config, alphas, schedule, grid, time, out, closure;
  unsigned cutoff = 0, bound = 0;
  std::size_t levels = 0, pair = 0, slices = 0;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Config file first, then any flag the user actually gave.
RunConfig resolve(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : parse_config(read_file(f.config));
  auto given = [&](const char* name) {
    const CLI::Option* o = sub.get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--poly")) c.polynomial = f.poly;
  if (given("--cutoff")) c.cutoff = f.cutoff;
  if (given("--alphas")) c.alphas = parse_complex_list(f.alphas);
  if (given("--bound")) c.bound = f.bound;
  if (given("--schedule")) c.schedule = f.schedule;
  if (given("--levels")) c.levels = c.decide_levels = f.levels;
  if (given("--closure")) c.closure = f.closure;
  if (given("--pair")) c.pair = f.pair;
  if (given("--slices")) c.num_slices = f.slices;
  if (given("--out")) c.directory = f.out;
  if (given("--seed")) c.seed = f.seed;
  if (given("--time")) {
    c.times = parse_double_list(f.time);
    if (c.times.size() == 1) c.decide_time = c.times.front();
  }
  if (given("--grid")) {
    // A bare integer is a point count; anything else is an explicit list.
    if (f.grid.find_first_not_of("0123456789 ") == std::string::npos) {
      c.points = std::stoul(f.grid);
      c.grid.clear();
    } else {
      c.grid = parse_double_list(f.grid);
    }
  }
  if (c.polynomial.empty()) throw CLI::RequiredError("--poly (or [problem] polynomial in --config)");
  return c;
}

std::filesystem::path artifact(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.directory);
  return std::filesystem::path(c.directory) / name;
}

// The output directory is left out so identical runs produce identical files.
std::string header(const std::string& command, const RunConfig& c) {
  RunConfig recorded = c;
  recorded.directory = ".";
  return "command = " + command + "\n" + to_text(recorded);
}

template <class Writer>
std::filesystem::path write_artifact(const RunConfig& c, const std::string& name, Writer&& w) {
  const auto path = artifact(c, name);
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  w(f);
  return path;
}

struct Setup {
  DiophantinePolynomial poly;
  TruncatedBasis basis;
  std::vector<Complex> alphas;
  HermitianMatrix hp;
  HermitianMatrix hi;
};

Setup build(const RunConfig& c, std::ostream& err) {
  DiophantinePolynomial poly = parse_polynomial(c.polynomial);
  TruncatedBasis basis = enumerate_basis(poly.num_vars(), c.cutoff);
  auto alphas = resolve_alphas(c, poly.num_vars());
  AssemblyLog log;
  HermitianMatrix hp = build_hp(poly, basis, &log);
  for (const auto& w : log.warnings) err << "warning: " << w << '\n';
  HermitianMatrix hi = build_hi(alphas, basis);
  return {std::move(poly), std::move(basis), std::move(alphas), std::move(hp), std::move(hi)};
}

int cmd_parse(const RunConfig& c, std::ostream& out) {
  const auto poly = parse_polynomial(c.polynomial);
  out << poly.to_string() << "  (variables:";
  for (const auto& v : poly.variable_names()) out << ' ' << v;
  out << "; degree " << poly.degree() << ")\n";
  return exit_ok;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const auto poly = parse_polynomial(c.polynomial);
  const unsigned bound = c.bound ? c.bound : c.cutoff;
  const auto sols = brute_force_oracle(poly, bound);
  out << sols.size() << " solution(s) with every n_i <= " << bound;
  for (const auto& s : sols) out << ' ' << format_occupation(s);
  out << '\n';
  return sols.empty() ? exit_no_solution : exit_ok;
}

int cmd_spectrum(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Setup st = build(c, err);
  const std::size_t m = std::min(c.levels, st.basis.dimension());
  std::vector<SpectrumSlice> slices;
  for (double s : resolve_grid(c)) slices.push_back(spectrum_at(st.hp, st.hi, Schedule::parse(c.schedule), s, m));
  const auto path = write_artifact(c, "spectrum.csv",
                                   [&](std::ostream& f) { write_spectrum_csv(f, header("spectrum", c), slices, c.pair); });
  out << "spectrum: " << slices.size() << " slices, " << m << " levels -> " << path.string() << '\n';
  return exit_ok;
}

int cmd_gap(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Setup st = build(c, err);
  const GapReport r = min_gap_scan(st.hp, st.hi, Schedule::parse(c.schedule), resolve_grid(c), c.pair);
  const auto path = write_artifact(c, "gap.csv", [&](std::ostream& f) { write_gap_csv(f, header("gap", c), r); });
  out << "gap_" << c.pair << ": min " << csv_number(r.min_gap) << " at s=" << csv_number(r.min_gap_s)
      << (r.degenerate ? " (degenerate)" : "") << " -> " << path.string() << '\n';
  return exit_ok;
}

int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Setup st = build(c, err);
  FlowConfig fc = make_flow_config(c);
  fc.levels = std::min(fc.levels, st.basis.dimension());
  for (double s : resolve_grid(c))
    if (s > fc.epsilon_start && s < fc.end_s) fc.output_s.push_back(s);
  fc.output_s.push_back(fc.end_s);
  const FlowState init = initial_conditions(st.alphas, st.basis, fc.levels, fc.epsilon_start, st.hp, st.hi,
                                            fc.schedule);
  const FlowTrajectory traj = integrate_flow(fc, st.hp, st.hi, init);
  const ResidualReport res = flow_vs_diagonalization_residual(traj, st.hp, st.hi, fc.schedule);
  const auto path = write_artifact(c, "flow.csv", [&](std::ostream& f) { write_flow_csv(f, header("flow", c), traj); });
  out << "flow: E_0(" << csv_number(fc.end_s) << ")=" << csv_number(traj.final_state().energies(0))
      << " max|E_flow-E_diag|=" << csv_number(res.max_energy_deviation)
      << " min overlap=" << csv_number(res.min_overlap) << " -> " << path.string() << '\n';
  return exit_ok;
}

int cmd_evolve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Setup st = build(c, err);
  EvolutionConfig ec;
  ec.schedule = Schedule::parse(c.schedule);
  ec.num_slices = c.num_slices;
  const StateVector init = coherent_coefficients(st.alphas, st.basis).coefficients;
  const SpectrumSlice end = spectrum_at(st.hp, st.hi, ec.schedule, c.end_s,
                                        std::min<std::size_t>(st.basis.dimension(), 8));
  const auto sweep = adiabatic_sweep(c.times, ec, st.hp, st.hi, init, end);
  const auto path =
      write_artifact(c, "sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, header("evolve", c), sweep); });
  out << "evolve:";
  for (const auto& p : sweep)
    out << " P(T=" << csv_number(p.total_time) << ")=" << csv_number(p.probability) << " outcome "
        << format_occupation(st.basis.tuple_of(p.dominant_index));
  out << " -> " << path.string() << '\n';
  return exit_ok;
}

int cmd_decide(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto poly = parse_polynomial(c.polynomial);
  DecisionConfig dc = make_decision_config(c);
  dc.alphas = resolve_alphas(c, poly.num_vars());
  const DecisionReport r = decide(poly, dc);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  const auto path = write_artifact(c, "decision.txt", [&](std::ostream& f) {
    write_comment_block(f, header("decide", c));
    write_report(f, r);
  });
  out << to_string(r.verdict);
  if (r.witness) out << ' ' << format_occupation(*r.witness);
  out << " e0_limit=" << csv_number(r.e0_limit_estimate) << " -> " << path.string() << '\n';
  switch (r.verdict) {
    case Verdict::solution_found: return exit_ok;
    case Verdict::no_solution_in_window: return exit_no_solution;
    case Verdict::inconclusive: break;
  }
  return exit_inconclusive;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral-flow search for nonnegative integer roots of polynomials", "fockflow"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&](CLI::App* sub, bool physics) {
    sub->add_option("--poly", f.poly, "polynomial, e.g. \"x^2 + y^2 - 25\"");
    sub->add_option("--config", f.config, "config file (flags override it)");
    sub->add_option("--cutoff", f.cutoff, "per-mode occupation cutoff N");
    sub->add_option("--out", f.out, "artifact directory");
    sub->add_option("--seed", f.seed, "recorded in artifact headers");
    if (!physics) return;
    sub->add_option("--alphas", f.alphas, "displacements, one or one per variable, e.g. \"0.9+0.1i,1\"");
    sub->add_option("--levels", f.levels, "number of tracked levels");
    sub->add_option("--schedule", f.schedule, "linear | smoothstep");
    sub->add_option("--closure", f.closure, "resolvent | tracked");
    sub->add_option("--grid", f.grid, "point count, or comma-separated s values");
    sub->add_option("--pair", f.pair, "gap index l (E_{l+1} - E_l)");
    sub->add_option("--time", f.time, "total time(s), comma-separated");
    sub->add_option("--slices", f.slices, "time slices (0: automatic)");
  };

  auto* parse = app.add_subcommand("parse", "canonicalize a polynomial");
  auto* oracle = app.add_subcommand("oracle", "enumerate roots in the bounded window");
  auto* spectrum = app.add_subcommand("spectrum", "instantaneous spectrum over a grid");
  auto* gap = app.add_subcommand("gap", "minimum-gap scan");
  auto* flow = app.add_subcommand("flow", "integrate the spectral flow");
  auto* evolve_cmd = app.add_subcommand("evolve", "time-dependent adiabatic sweep");
  auto* decide_cmd = app.add_subcommand("decide", "full decision pipeline");
  add_common(parse, false);
  add_common(oracle, false);
  oracle->add_option("--bound", f.bound, "per-variable bound (default: cutoff)");
  for (auto* s : {spectrum, gap, flow, evolve_cmd, decide_cmd}) add_common(s, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const RunConfig c = resolve(*sub, f);
    if (sub == parse) return cmd_parse(c, out);
    if (sub == oracle) return cmd_oracle(c, out);
    if (sub == spectrum) return cmd_spectrum(c, out, err);
    if (sub == gap) return cmd_gap(c, out, err);
    if (sub == flow) return cmd_flow(c, out, err);
    if (sub == evolve_cmd) return cmd_evolve(c, out, err);
    return cmd_decide(c, out, err);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return exit_data;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << '\n';
    return exit_data;
  }
}

}  // namespace fockflow
