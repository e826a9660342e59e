#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fockflow/dynamics.hpp"
#include "fockflow/flow.hpp"
#include "fockflow/fock.hpp"
#include "fockflow/polynomial.hpp"
#include "fockflow/spectra.hpp"

namespace fockflow {

enum class Verdict { solution_found, no_solution_in_window, inconclusive };

std::string to_string(Verdict v);

/// Default per-mode displacements: (0.9 + 0.1i) scaled by 1 - 0.1 i for mode i
/// (0-based). Distinct magnitudes break the exchange symmetry of symmetric
/// polynomials, which otherwise produces exact level crossings; shrinking
/// rather than growing keeps the coherent tail inside small windows.
std::vector<Complex> default_alphas(std::size_t modes);
/// Spreads one displacement over `modes` modes the same way default_alphas does.
std::vector<Complex> spread_alpha(Complex base, std::size_t modes);
/// Perturbation amplitudes of magnitude scale * (1 + 0.3 i) with phase i^i.
std::vector<Complex> default_epsilons(double scale, std::size_t modes);

/// All tuples with every n_i <= bound and D(n) = 0, in basis order.
std::vector<Occupation> brute_force_oracle(const DiophantinePolynomial& poly, unsigned bound,
                                           std::size_t budget = std::size_t{1} << 24);

/// First of the `top_k` heaviest basis states on which D vanishes exactly.
std::optional<Occupation> extract_witness(const StateVector& ground, const DiophantinePolynomial& poly,
                                          const TruncatedBasis& basis, std::size_t top_k);

/// Probability mass on states with some n_i >= N - 1.
double boundary_leakage(const StateVector& v, const TruncatedBasis& basis);

inline FlowConfig decision_flow_defaults() {
  FlowConfig f;
  f.levels = 4;
  return f;
}

struct DecisionConfig {
  unsigned cutoff = 8;
  std::vector<Complex> alphas;  // empty: default_alphas(K)
  /// Four tracked levels: the resolvent closure makes the ground level exact
  /// regardless of M, and fewer excited levels means fewer excited crossings.
  FlowConfig flow = decision_flow_defaults();
  /// E_0 samples for the s -> 1 extrapolation.
  std::vector<double> limit_points{1.0 - 1e-2, 1.0 - 3e-3, 1.0 - 1e-3};
  std::size_t scan_points = 101;
  double positivity_margin = 0.5;
  double leakage_bound = 1e-6;
  /// Ground-energy agreement required between flow and diagonalization.
  double route_tolerance = 1e-4;
  std::size_t witness_top_k = 8;
  /// Schrodinger-route total time; 0 skips the dynamics route.
  double dynamics_time = 20.0;
  std::size_t dynamics_slices = 0;
  bool force_perturbation = false;
  std::vector<double> perturbation_scales{1e-2, 3e-3};
  TailPolicy tail{};
  EigenOptions eigen{};
};

/// Outcome of one flow pass (unperturbed, or at one perturbation scale).
struct FlowPass {
  double perturbation_scale = 0.0;  // 0 for the unperturbed operator
  std::size_t levels_used = 0;
  GroundLimit limit;
  double flow_deviation = 0.0;  // ground-level |E_flow - E_diag| over the check points
  double min_overlap = 1.0;
  double min_tracked_gap = 0.0;
  double min_tracked_gap_s = 0.0;
  std::size_t reseeds = 0;  // tracking restarts past near-degeneracies
  double boundary_leakage = 0.0;
  std::optional<Occupation> witness;
  Verdict verdict = Verdict::inconclusive;
};

struct DecisionReport {
  std::string polynomial;
  Verdict verdict = Verdict::inconclusive;
  std::optional<Occupation> witness;
  double e0_limit_estimate = NAN;
  double min_gap = NAN;  // ground gap scan over (0,1)
  double min_gap_s = NAN;
  double boundary_leakage = NAN;

  std::size_t modes = 0;
  unsigned cutoff = 0;
  std::size_t levels = 0;
  std::vector<Complex> alphas;
  std::string schedule;

  bool flow_agrees = false;
  std::optional<bool> dynamics_agrees;
  double dynamics_probability = NAN;
  std::optional<Occupation> dynamics_outcome;
  bool perturbation_used = false;
  std::vector<FlowPass> passes;
  std::vector<std::string> warnings;
  std::vector<std::string> reasons;
};

/// Full pipeline: gap scan, optional degeneracy-lifting perturbation, flow,
/// s -> 1 extrapolation, witness extraction with exact verification, dynamics
/// cross-check. Sub-stage failures produce `inconclusive`, never a verdict.
DecisionReport decide(const DiophantinePolynomial& poly, const DecisionConfig& config);

/// Sectioned key = value text.
void write_report(std::ostream& out, const DecisionReport& report);

std::string format_occupation(const Occupation& n);
std::string format_complex(Complex z);

}  // namespace fockflow
