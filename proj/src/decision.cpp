#include "fockflow/decision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "fockflow/error.hpp"

namespace fockflow {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::solution_found: return "solution_found";
    case Verdict::no_solution_in_window: return "no_solution_in_window";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Complex> spread_alpha(Complex base, std::size_t modes) {
  std::vector<Complex> a(modes);
  for (std::size_t i = 0; i < modes; ++i) a[i] = base * (1.0 - 0.1 * double(i));
  return a;
}

std::vector<Complex> default_alphas(std::size_t modes) { return spread_alpha({0.9, 0.1}, modes); }

std::vector<Complex> default_epsilons(double scale, std::size_t modes) {
  static const Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::vector<Complex> e(modes);
  for (std::size_t i = 0; i < modes; ++i) e[i] = scale * (1.0 + 0.3 * double(i)) * kPhase[i % 4];
  return e;
}

std::vector<Occupation> brute_force_oracle(const DiophantinePolynomial& poly, unsigned bound, std::size_t budget) {
  const TruncatedBasis window(poly.num_vars(), std::max(1u, bound), budget);
  std::vector<Occupation> out;
  for (std::size_t idx = 0; idx < window.dimension(); ++idx) {
    Occupation n = window.tuple_of(idx);
    if (std::any_of(n.begin(), n.end(), [&](unsigned v) { return v > bound; })) continue;
    if (poly.evaluate(n) == 0) out.push_back(std::move(n));
  }
  return out;
}

std::optional<Occupation> extract_witness(const StateVector& ground, const DiophantinePolynomial& poly,
                                          const TruncatedBasis& basis, std::size_t top_k) {
  if (ground.size() != static_cast<Eigen::Index>(basis.dimension()))
    throw DimensionError("vector does not match the basis dimension");
  std::vector<std::size_t> order(basis.dimension());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t k = std::min(top_k, order.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
    const double pa = std::norm(ground[a]), pb = std::norm(ground[b]);
    return pa != pb ? pa > pb : a < b;
  });
  for (std::size_t j = 0; j < k; ++j) {
    Occupation n = basis.tuple_of(order[j]);
    if (poly.evaluate(n) == 0) return n;
  }
  return std::nullopt;
}

double boundary_leakage(const StateVector& v, const TruncatedBasis& basis) {
  if (v.size() != static_cast<Eigen::Index>(basis.dimension()))
    throw DimensionError("vector does not match the basis dimension");
  const unsigned shell = basis.cutoff() - 1;
  double mass = 0.0, total = 0.0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const double p = std::norm(v[idx]);
    total += p;
    for (std::size_t i = 0; i < basis.num_modes(); ++i)
      if (basis.occupation(idx, i) >= shell) {
        mass += p;
        break;
      }
  }
  return total > 0.0 ? std::clamp(mass / total, 0.0, 1.0) : 0.0;
}

namespace {

struct Problem {
  const DiophantinePolynomial& poly;
  const TruncatedBasis& basis;
  const std::vector<Complex>& alphas;
  const HermitianMatrix& hi;
  const DecisionConfig& config;
};

FlowTrajectory run_flow(const Problem& pb, const HermitianMatrix& hp, FlowConfig fc, std::vector<std::string>& notes) {
  for (;;) {
    try {
      const FlowState init = initial_conditions(pb.alphas, pb.basis, fc.levels, fc.epsilon_start, hp, pb.hi,
                                                fc.schedule, pb.config.tail);
      return integrate_flow(fc, hp, pb.hi, init);
    } catch (const NumericError& e) {
      if (fc.levels <= 2) throw;
      notes.push_back("flow with " + std::to_string(fc.levels) + " tracked levels failed (" + e.what() +
                      "); retrying with " + std::to_string(std::max<std::size_t>(2, fc.levels / 2)));
      fc.levels = std::max<std::size_t>(2, fc.levels / 2);
    }
  }
}

FlowPass flow_pass(const Problem& pb, const HermitianMatrix& hp, double scale, std::vector<std::string>& notes) {
  const DecisionConfig& cfg = pb.config;
  FlowConfig fc = cfg.flow;
  fc.levels = std::min(fc.levels, pb.basis.dimension());
  fc.end_s = *std::max_element(cfg.limit_points.begin(), cfg.limit_points.end());
  fc.output_s.clear();
  for (int j = 1; j <= 9; ++j) fc.output_s.push_back(0.1 * j);
  for (double s : cfg.limit_points)
    if (s < fc.end_s) fc.output_s.push_back(s);

  fc.reseed_on_collapse = true;
  const FlowTrajectory traj = run_flow(pb, hp, fc, notes);
  FlowPass pass;
  pass.reseeds = traj.reseeds.size();
  if (!traj.reseeds.empty())
    notes.push_back("flow restarted from diagonalization " + std::to_string(traj.reseeds.size()) +
                    " time(s) past near-degenerate tracked levels (first at s=" + format_number(traj.reseeds.front()) +
                    ")");
  pass.perturbation_scale = scale;
  pass.levels_used = traj.final_state().levels();
  pass.limit = estimate_ground_limit(traj, cfg.limit_points);
  pass.min_tracked_gap = traj.min_gap;
  pass.min_tracked_gap_s = traj.min_gap_s;

  const ResidualReport res = flow_vs_diagonalization_residual(traj, hp, pb.hi, fc.schedule, cfg.eigen);
  pass.flow_deviation = res.ground_energy_deviation;
  pass.min_overlap = res.min_overlap;

  StateVector ground = traj.final_state().vectors.col(0);
  ground.normalize();
  pass.boundary_leakage = boundary_leakage(ground, pb.basis);
  pass.witness = extract_witness(ground, pb.poly, pb.basis, cfg.witness_top_k);

  if (pass.witness) pass.verdict = Verdict::solution_found;
  else if (pass.limit.value >= cfg.positivity_margin && pass.boundary_leakage <= cfg.leakage_bound &&
           pass.flow_deviation <= cfg.route_tolerance)
    pass.verdict = Verdict::no_solution_in_window;
  else
    pass.verdict = Verdict::inconclusive;
  return pass;
}

}  // namespace

DecisionReport decide(const DiophantinePolynomial& poly, const DecisionConfig& config) {
  DecisionReport rep;
  rep.polynomial = poly.to_string();
  rep.modes = poly.num_vars();
  rep.cutoff = config.cutoff;
  rep.alphas = config.alphas.empty() ? default_alphas(poly.num_vars()) : config.alphas;
  rep.schedule = config.flow.schedule.name();
  rep.levels = config.flow.levels;
  if (rep.alphas.size() != poly.num_vars())
    throw DimensionError("got " + std::to_string(rep.alphas.size()) + " displacements for " +
                         std::to_string(poly.num_vars()) + " variables");
  if (config.limit_points.size() < 2) throw DomainError("s -> 1 extrapolation needs at least two points");

  try {
    const TruncatedBasis basis = enumerate_basis(poly.num_vars(), config.cutoff);
    AssemblyLog log;
    const HermitianMatrix hp = build_hp(poly, basis, &log);
    const HermitianMatrix hi = build_hi(rep.alphas, basis);
    rep.warnings = log.warnings;
    if (commutator_norm(hp, hi) == 0.0) {
      rep.reasons.push_back("H_P commutes with H_I (constant polynomial or zero displacement)");
      return rep;
    }
    const TailPolicy& tail = config.tail;
    const double window_mass = coherent_window_mass(rep.alphas, config.cutoff);
    if (1.0 - window_mass > 1e-12)
      rep.warnings.push_back("coherent tail mass " + format_number(1.0 - window_mass) +
                             " above 1e-12; consider a larger cutoff");
    if (1.0 - window_mass > tail.max_tail_mass) {
      rep.reasons.push_back("cutoff too small for the displacement: coherent tail mass " +
                            format_number(1.0 - window_mass));
      return rep;
    }

    const GapReport scan = min_gap_scan(hp, hi, config.flow.schedule, interior_grid(config.scan_points), 0,
                                        config.eigen);
    rep.min_gap = scan.min_gap;
    rep.min_gap_s = scan.min_gap_s;

    const Problem pb{poly, basis, rep.alphas, hi, config};
    HermitianMatrix hp_used = hp;
    if (scan.degenerate || config.force_perturbation) {
      rep.perturbation_used = true;
      if (scan.degenerate)
        rep.warnings.push_back("ground gap below the degeneracy threshold near s=" + format_number(scan.min_gap_s) +
                               "; lifting with the perturbed problem operator");
      std::vector<double> scales = config.perturbation_scales;
      std::sort(scales.rbegin(), scales.rend());
      for (double scale : scales) {
        const HermitianMatrix hpe = perturbed_hp(hp, default_epsilons(scale, basis.num_modes()));
        rep.passes.push_back(flow_pass(pb, hpe, scale, rep.warnings));
      }
      hp_used = perturbed_hp(hp, default_epsilons(scales.back(), basis.num_modes()));
    } else {
      rep.passes.push_back(flow_pass(pb, hp, 0.0, rep.warnings));
    }

    // Combine passes: the smallest perturbation carries the diagnostics; the
    // energy limit is extrapolated in eps^2 when several scales ran.
    const FlowPass& last = rep.passes.back();
    rep.levels = last.levels_used;
    rep.boundary_leakage = last.boundary_leakage;
    if (rep.passes.size() > 1) {
      std::vector<double> x, y;
      for (const auto& p : rep.passes) {
        x.push_back(p.perturbation_scale * p.perturbation_scale);
        y.push_back(p.limit.value);
      }
      rep.e0_limit_estimate = extrapolate_to_zero(x, y);
    } else {
      rep.e0_limit_estimate = last.limit.value;
    }
    rep.flow_agrees = std::all_of(rep.passes.begin(), rep.passes.end(),
                                  [&](const FlowPass& p) { return p.flow_deviation <= config.route_tolerance; });
    for (auto it = rep.passes.rbegin(); it != rep.passes.rend() && !rep.witness; ++it) rep.witness = it->witness;

    if (config.dynamics_time > 0.0) {
      EvolutionConfig ec;
      ec.total_time = config.dynamics_time;
      ec.num_slices = config.dynamics_slices;
      ec.schedule = config.flow.schedule;
      ec.dense_limit = config.eigen.dense_limit;
      const StateVector init = coherent_coefficients(rep.alphas, basis, tail).coefficients;
      const EvolutionResult evo = evolve(ec, hp_used, hi, init);
      const double end_s = *std::max_element(config.limit_points.begin(), config.limit_points.end());
      const SpectrumSlice end = spectrum_at(hp_used, hi, config.flow.schedule, end_s,
                                            std::min<std::size_t>(basis.dimension(), 8), config.eigen);
      rep.dynamics_probability = ground_overlap(evo.final_state, end);
      rep.dynamics_outcome = basis.tuple_of(dominant_outcome(evo.final_state));
      const bool dyn_solution = poly.evaluate(*rep.dynamics_outcome) == 0;
      if (!rep.witness && dyn_solution) {
        rep.witness = rep.dynamics_outcome;
        rep.warnings.push_back("witness found by the dynamics route only");
      }
      rep.dynamics_agrees = dyn_solution == rep.witness.has_value();
    }

    bool passes_agree = true;
    for (const auto& p : rep.passes) passes_agree = passes_agree && p.verdict == rep.passes.front().verdict;

    if (rep.witness) {
      if (poly.evaluate(*rep.witness) != 0) throw NumericError("witness failed exact verification");
      rep.verdict = Verdict::solution_found;
      if (rep.dynamics_agrees == false) rep.warnings.push_back("dynamics route disagrees with the flow witness");
      if (!passes_agree) rep.warnings.push_back("perturbation passes disagree");
      return rep;
    }
    if (!(rep.e0_limit_estimate >= config.positivity_margin))
      rep.reasons.push_back("extrapolated ground energy " + format_number(rep.e0_limit_estimate) +
                            " below the positivity margin but no witness verified");
    if (!(rep.boundary_leakage <= config.leakage_bound))
      rep.reasons.push_back("boundary leakage " + format_number(rep.boundary_leakage) +
                            " exceeds bound; the window may be too small");
    if (!rep.flow_agrees) rep.reasons.push_back("flow and diagonalization routes disagree");
    if (rep.dynamics_agrees == false) rep.reasons.push_back("dynamics route disagrees");
    if (!passes_agree) rep.reasons.push_back("verdicts differ across perturbation scales");
    rep.verdict = rep.reasons.empty() ? Verdict::no_solution_in_window : Verdict::inconclusive;
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    rep.verdict = Verdict::inconclusive;
    rep.witness.reset();
    rep.reasons.push_back(std::string("aborted: ") + e.what());
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::string format_occupation(const Occupation& n) {
  std::string s = "(";
  for (std::size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + std::to_string(n[i]);
  return s + ")";
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string format_complex(Complex z) {
  char buf[80];
  if (z.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.17g", z.real());
  else if (z.real() == 0.0) std::snprintf(buf, sizeof buf, "%.17gi", z.imag());
  else std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

void write_report(std::ostream& out, const DecisionReport& r) {
  auto yes = [](bool b) { return b ? "true" : "false"; };
  out << "[decision]\n";
  out << "polynomial = " << r.polynomial << "\n";
  out << "verdict = " << to_string(r.verdict) << "\n";
  out << "witness = " << (r.witness ? format_occupation(*r.witness) : "none") << "\n";
  out << "e0_limit_estimate = " << num(r.e0_limit_estimate) << "\n";
  out << "\n[truncation]\n";
  out << "modes = " << r.modes << "\n";
  out << "cutoff = " << r.cutoff << "\n";
  out << "levels = " << r.levels << "\n";
  out << "alphas = ";
  for (std::size_t i = 0; i < r.alphas.size(); ++i) out << (i ? ", " : "") << format_complex(r.alphas[i]);
  out << "\nschedule = " << r.schedule << "\n";
  out << "\n[diagnostics]\n";
  out << "min_gap = " << num(r.min_gap) << "\n";
  out << "min_gap_s = " << num(r.min_gap_s) << "\n";
  out << "boundary_leakage = " << num(r.boundary_leakage) << "\n";
  out << "flow_agrees = " << yes(r.flow_agrees) << "\n";
  out << "dynamics_agrees = " << (r.dynamics_agrees ? yes(*r.dynamics_agrees) : "not_run") << "\n";
  out << "dynamics_probability = " << num(r.dynamics_probability) << "\n";
  out << "dynamics_outcome = " << (r.dynamics_outcome ? format_occupation(*r.dynamics_outcome) : "none") << "\n";
  out << "perturbation_used = " << yes(r.perturbation_used) << "\n";
  for (std::size_t k = 0; k < r.passes.size(); ++k) {
    const FlowPass& p = r.passes[k];
    out << "\n[pass." << k << "]\n";
    out << "perturbation_scale = " << num(p.perturbation_scale) << "\n";
    out << "levels_used = " << p.levels_used << "\n";
    out << "verdict = " << to_string(p.verdict) << "\n";
    out << "witness = " << (p.witness ? format_occupation(*p.witness) : "none") << "\n";
    for (std::size_t j = 0; j < p.limit.s.size(); ++j)
      out << "e0_at." << num(p.limit.s[j]) << " = " << num(p.limit.e0[j]) << "\n";
    out << "e0_limit = " << num(p.limit.value) << "\n";
    out << "flow_deviation = " << num(p.flow_deviation) << "\n";
    out << "min_vector_overlap = " << num(p.min_overlap) << "\n";
    out << "min_tracked_gap = " << num(p.min_tracked_gap) << "\n";
    out << "min_tracked_gap_s = " << num(p.min_tracked_gap_s) << "\n";
    out << "reseeds = " << p.reseeds << "\n";
    out << "boundary_leakage = " << num(p.boundary_leakage) << "\n";
  }
  if (!r.warnings.empty()) {
    out << "\n[warnings]\n";
    for (std::size_t k = 0; k < r.warnings.size(); ++k) out << "warning." << k << " = " << r.warnings[k] << "\n";
  }
  if (!r.reasons.empty()) {
    out << "\n[reasons]\n";
    for (std::size_t k = 0; k < r.reasons.size(); ++k) out << "reason." << k << " = " << r.reasons[k] << "\n";
  }
}

}  // namespace fockflow
