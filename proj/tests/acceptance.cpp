// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fockflow/decision.hpp"
#include "fockflow/error.hpp"

using namespace fockflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Problem {
  DiophantinePolynomial poly;
  std::vector<Complex> alphas;
  TruncatedBasis basis;
  HermitianMatrix hp, hi;
};

Problem problem(const char* text, std::vector<Complex> alphas, unsigned cutoff) {
  auto poly = parse_polynomial(text);
  auto basis = enumerate_basis(poly.num_vars(), cutoff);
  auto hp = build_hp(poly, basis);
  auto hi = build_hi(alphas, basis);
  return {std::move(poly), std::move(alphas), std::move(basis), std::move(hp), std::move(hi)};
}

// Decisions shared by criteria 6, 7, 9 and 11, computed once.
struct DecisionCase {
  std::string poly;
  std::string alpha_label;
  DecisionReport report;
};

std::vector<DecisionCase> g_cases;

const DecisionReport& decision(const std::string& poly, const std::string& label, std::optional<Complex> alpha) {
  for (const auto& c : g_cases)
    if (c.poly == poly && c.alpha_label == label) return c.report;
  const auto p = parse_polynomial(poly);
  DecisionConfig cfg;
  if (alpha) cfg.alphas = spread_alpha(*alpha, p.num_vars());
  g_cases.push_back({poly, label, decide(p, cfg)});
  return g_cases.back().report;
}

Outcome initial_spectrum() {
  const auto t0 = Clock::now();
  const auto pr = problem("x + y", {1.0, 1.0}, 20);
  const auto sl = instantaneous_spectrum(pr.hi, 4);
  const double expected[4] = {0.0, 1.0, 1.0, 2.0};
  double dev = 0.0;
  for (int q = 0; q < 4; ++q) dev = std::max(dev, std::abs(sl.energies[q] - expected[q]));
  const double t = seconds_since(t0);
  return {dev <= 1e-6 && t < 5.0, "max deviation " + fmt("%.3g", dev) + ", " + fmt("%.2f", t) + " s"};
}

Outcome initial_vectors() {
  const auto pr = problem("x + y", {1.0, 1.0}, 20);
  const auto c0 = coherent_coefficients(pr.alphas, pr.basis);
  const auto c1 = excited_initial_coefficients(pr.alphas, pr.basis, 0);
  const auto c2 = excited_initial_coefficients(pr.alphas, pr.basis, 1);
  const double r0 = (pr.hi.apply(c0.coefficients)).norm();
  const double r1 = (pr.hi.apply(c1.coefficients) - c1.coefficients).norm();
  const double r2 = (pr.hi.apply(c2.coefficients) - c2.coefficients).norm();
  const double res = std::max({r0, r1, r2});
  const double tail = std::max({c0.tail_mass, c1.tail_mass, c2.tail_mass});
  return {res <= 1e-8 && tail < 1e-12, "max residual " + fmt("%.3g", res) + ", tail " + fmt("%.3g", tail)};
}

Outcome flow_vs_diagonalization() {
  const auto t0 = Clock::now();
  const auto pr = problem("x - 3", {1.0}, 8);
  FlowConfig fc;
  fc.levels = 6;
  for (int j = 1; j <= 9; ++j) fc.output_s.push_back(0.1 * j);
  fc.end_s = 0.9;
  const auto init = initial_conditions(pr.alphas, pr.basis, 6, fc.epsilon_start, pr.hp, pr.hi, fc.schedule);
  const auto traj = integrate_flow(fc, pr.hp, pr.hi, init);
  const auto rep = flow_vs_diagonalization_residual(traj, pr.hp, pr.hi, fc.schedule);
  const double t = seconds_since(t0);
  const bool ok = rep.rows.size() == 9 && rep.max_energy_deviation <= 1e-4 && rep.min_overlap >= 0.9999 && t < 30.0;
  return {ok, "max |dE| " + fmt("%.3g", rep.max_energy_deviation) + ", min overlap " +
                  fmt("%.8f", rep.min_overlap) + ", " + fmt("%.2f", t) + " s"};
}

Outcome derivative_check() {
  const auto pr = problem("x - 3", {1.0}, 8);
  FlowConfig fc;
  fc.levels = 6;
  fc.output_s = {0.5};
  const auto init = initial_conditions(pr.alphas, pr.basis, 6, fc.epsilon_start, pr.hp, pr.hi, fc.schedule);
  const auto traj = integrate_flow(fc, pr.hp, pr.hi, init);
  const auto w = build_w(pr.hp, pr.hi);
  const double slope = flow_rhs(traj.at(0.5), pr.hi, w, fc.schedule, fc.closure, fc.min_gap).energies[0];
  std::vector<double> errs;
  for (double h : {0.04, 0.02, 0.01}) {
    const auto up = spectrum_at(pr.hp, pr.hi, fc.schedule, 0.5 + h, 1);
    const auto down = spectrum_at(pr.hp, pr.hi, fc.schedule, 0.5 - h, 1);
    errs.push_back(std::abs((up.energies[0] - down.energies[0]) / (2 * h) - slope));
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  return {r1 >= 3.5 && r2 >= 3.5, "error ratios " + fmt("%.3f", r1) + ", " + fmt("%.3f", r2)};
}

Outcome gap_formula() {
  const auto pr = problem("x - 3", {1.0}, 8);
  const Schedule sc;
  const auto w = build_w(pr.hp, pr.hi);
  const double s0 = 0.45;
  const auto slice = spectrum_at(pr.hp, pr.hi, sc, s0, 4);
  const StateVector e0 = slice.vectors.col(0), e1 = slice.vectors.col(1);
  double two_level_dev = 0.0;
  std::vector<double> full_dev;
  for (double ds : {8e-3, 4e-3, 2e-3}) {
    const double df = sc.derivative(s0) * ds;
    Eigen::Matrix2cd h2;
    h2(0, 0) = slice.energies[0] + df * w.matrix_element(e0, e0);
    h2(1, 1) = slice.energies[1] + df * w.matrix_element(e1, e1);
    h2(0, 1) = df * w.matrix_element(e0, e1);
    h2(1, 0) = std::conj(h2(0, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h2);
    const double predicted = avoided_crossing_prediction(slice, w, sc, s0, ds, 0);
    two_level_dev = std::max(two_level_dev, std::abs(predicted - (es.eigenvalues()[1] - es.eigenvalues()[0])));
    const auto full = spectrum_at(pr.hp, pr.hi, sc, s0 + ds, 2);
    full_dev.push_back(std::abs(predicted - (full.energies[1] - full.energies[0])));
  }
  const double r1 = full_dev[0] / full_dev[1], r2 = full_dev[1] / full_dev[2];
  return {two_level_dev <= 1e-12 && r1 >= 3.5 && r2 >= 3.5,
          "2x2 deviation " + fmt("%.3g", two_level_dev) + ", shrink ratios " + fmt("%.3f", r1) + ", " +
              fmt("%.3f", r2)};
}

Outcome solvable_decisions() {
  std::string detail;
  bool ok = true;
  for (const char* text : {"x - 3", "x + y - 3", "(x + 1)*(y + 1) - 6"}) {
    const auto& r = decision(text, "default", std::nullopt);
    const auto roots = brute_force_oracle(parse_polynomial(text), 8);
    const bool in_oracle =
        r.witness && std::find(roots.begin(), roots.end(), *r.witness) != roots.end();
    const bool good = r.verdict == Verdict::solution_found && in_oracle && r.e0_limit_estimate <= 1e-3;
    ok = ok && good;
    detail += std::string(detail.empty() ? "" : "; ") + text + ": " + to_string(r.verdict) + " " +
              (r.witness ? format_occupation(*r.witness) : "-") + " e0 " + fmt("%.3g", r.e0_limit_estimate);
  }
  return {ok, detail};
}

Outcome unsolvable_decision() {
  const auto& r = decision("2*x - 1", "default", std::nullopt);
  const bool ok = r.verdict == Verdict::no_solution_in_window && std::abs(r.e0_limit_estimate - 1.0) <= 1e-3 &&
                  r.boundary_leakage <= 1e-6;
  return {ok, to_string(r.verdict) + ", e0 " + fmt("%.9f", r.e0_limit_estimate) + ", leakage " +
                  fmt("%.3g", r.boundary_leakage)};
}

Outcome anti_overclaim() {
  DecisionConfig cfg;
  cfg.cutoff = 2;
  std::string detail;
  bool ok = true;
  for (const std::vector<Complex>& alphas :
       std::vector<std::vector<Complex>>{{}, {1.0}, {0.5}, {1.5}}) {
    cfg.alphas = alphas;
    const auto r = decide(parse_polynomial("x - 3"), cfg);
    const bool flagged = !r.reasons.empty() || !r.warnings.empty();
    const bool good = r.verdict != Verdict::solution_found &&
                      (r.verdict != Verdict::no_solution_in_window || flagged);
    ok = ok && good;
    detail += std::string(detail.empty() ? "" : "; ") + to_string(r.verdict);
  }
  return {ok, detail};
}

Outcome degeneracy_lift() {
  const auto pr = problem("x + y - 3", default_alphas(2), 8);
  const std::vector<Complex> eps{{0.01, 0.0}, {0.0, 0.013}};
  const auto lifted = perturbed_hp(pr.hp, eps);
  const auto end = instantaneous_spectrum(lifted, 2, 1.0);
  const double gap = end.energies[1] - end.energies[0];
  const double unlifted = instantaneous_spectrum(pr.hp, 2, 1.0).energies[1] -
                          instantaneous_spectrum(pr.hp, 2, 1.0).energies[0];
  const auto& r = decision("x + y - 3", "default", std::nullopt);
  bool same = r.perturbation_used && r.passes.size() == 2;
  std::vector<double> scales;
  for (const auto& p : r.passes) {
    same = same && p.verdict == r.passes.front().verdict;
    scales.push_back(p.perturbation_scale);
  }
  same = same && scales == std::vector<double>{1e-2, 3e-3};
  const bool ok = gap > degeneracy_threshold(lifted.norm_bound()) && unlifted == 0.0 && same;
  std::string detail = "gap at s=1 " + fmt("%.3g", gap) + " (unperturbed " + fmt("%.3g", unlifted) + "); verdicts";
  for (const auto& p : r.passes) detail += " " + to_string(p.verdict) + "@" + fmt("%g", p.perturbation_scale);
  return {ok, detail};
}

Outcome dynamics_route() {
  const auto t0 = Clock::now();
  const auto pr = problem("x - 3", {1.0}, 8);
  const Schedule sc;
  const auto end = spectrum_at(pr.hp, pr.hi, sc, 0.999, 4);
  const auto start = coherent_coefficients(pr.alphas, pr.basis).coefficients;
  const auto sweep = adiabatic_sweep({10.0, 50.0, 200.0}, EvolutionConfig{}, pr.hp, pr.hi, start, end);
  DecisionConfig cfg;
  cfg.alphas = {1.0};
  const auto flow = decide(pr.poly, cfg);
  bool ok = flow.witness.has_value();
  std::string detail = "P =";
  double drift = 0.0;
  for (std::size_t j = 0; j < sweep.size(); ++j) {
    drift = std::max(drift, sweep[j].norm_drift);
    if (j) ok = ok && sweep[j].probability >= sweep[j - 1].probability - 0.02;
    ok = ok && pr.basis.tuple_of(sweep[j].dominant_index) == (flow.witness ? *flow.witness : Occupation{});
    detail += " " + fmt("%.6f", sweep[j].probability);
  }
  ok = ok && drift <= 1e-8 && sweep.back().probability > 0.5;
  const double t = seconds_since(t0);
  ok = ok && t < 120.0;
  return {ok, detail + ", drift " + fmt("%.2g", drift) + ", outcome " +
                  format_occupation(pr.basis.tuple_of(sweep.back().dominant_index)) + ", " + fmt("%.1f", t) + " s"};
}

Outcome cross_alpha() {
  const std::vector<std::pair<std::string, Complex>> alphas{{"0.5", 0.5}, {"0.9+0.1i", {0.9, 0.1}}, {"1.5", 1.5}};
  bool ok = true;
  std::string detail;
  for (const char* text : {"x - 3", "x + y - 3", "(x + 1)*(y + 1) - 6", "2*x - 1"}) {
    const Verdict ref = decision(text, "default", std::nullopt).verdict;
    std::string row = std::string(text) + ":";
    for (const auto& [label, a] : alphas) {
      const Verdict v = decision(text, label, a).verdict;
      ok = ok && v == ref;
      row += " " + std::string(v == ref ? "=" : "!=");
    }
    detail += std::string(detail.empty() ? "" : "; ") + row;
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 initial spectrum (0,1,1,2)", initial_spectrum},
      {"2 initial eigenvectors", initial_vectors},
      {"3 flow vs diagonalization", flow_vs_diagonalization},
      {"4 energy derivative, second-order finite differences", derivative_check},
      {"5 avoided-crossing gap formula", gap_formula},
      {"6 solvable decisions", solvable_decisions},
      {"7 unsolvable-in-window decision", unsolvable_decision},
      {"8 anti-overclaim at N=2", anti_overclaim},
      {"9 degeneracy lift", degeneracy_lift},
      {"10 dynamics route", dynamics_route},
      {"11 cross-alpha confirmation", cross_alpha},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
