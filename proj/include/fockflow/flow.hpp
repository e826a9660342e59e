#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockflow/error.hpp"
#include "fockflow/fock.hpp"
#include "fockflow/operators.hpp"
#include "fockflow/spectra.hpp"

namespace fockflow {

/// How the flow equations account for levels outside the tracked set.
enum class Closure {
  /// Coupling to untracked levels is summed exactly through the reduced
  /// resolvent Q (E_q - Q H(s) Q)^{-1} Q W |E_q> on the truncated space.
  resolvent,
  /// Sums restricted to the tracked levels only.
  tracked,
};

Closure parse_closure(const std::string& name);
std::string to_string(Closure c);

/// Snapshot of the tracked levels. Column q of `vectors` holds C_{q;n}(s).
struct FlowState {
  double s = 0.0;
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  double norm_drift = 0.0;           // max_q | ||C_q|| - 1 |
  double orthogonality_drift = 0.0;  // max_{l != q} |<C_l|C_q>|
  double min_gap = 0.0;              // smallest |E_q - E_l| among tracked levels

  std::size_t levels() const noexcept { return static_cast<std::size_t>(energies.size()); }
};

struct FlowDerivative {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
};

struct FlowConfig {
  std::size_t levels = 8;
  double epsilon_start = 1e-3;
  double end_s = 1.0 - 1e-3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  Schedule schedule{};
  /// Abort when two tracked levels come closer than this. Absolute: the
  /// nonzero spectrum of H_P is bounded below by 1, which fixes the unit.
  double min_gap = 1e-8;
  Closure closure = Closure::resolvent;
  /// Extra output points inside [epsilon_start, end_s]; end_s is always emitted.
  std::vector<double> output_s;
  std::size_t max_steps = 200000;
  /// On a tracked-level collapse or step underflow, restart from direct
  /// diagonalization just past the trouble spot instead of aborting. Each
  /// restart is recorded in FlowTrajectory::reseeds.
  bool reseed_on_collapse = false;
  std::size_t max_reseeds = 64;

  void validate() const;
};

/// Two tracked levels approached closer than the abort threshold.
class GapCollapseError : public NumericError {
 public:
  GapCollapseError(double s, double gap)
      : NumericError("tracked levels nearly degenerate (gap " + format_number(gap) + ") at s=" +
                     format_number(s)),
        s_(s) {}
  double location() const noexcept { return s_; }

 private:
  double s_;
};

class NormDriftError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// dE_q/ds = f'(s) <E_q|W|E_q>
/// dC_q/ds = f'(s) sum_{l != q} <E_l|W|E_q> / (E_q - E_l) C_l
/// with the sum over tracked levels plus, for Closure::resolvent, the exact
/// remainder over the untracked part of the truncated spectrum.
FlowDerivative flow_rhs(const FlowState& state, const HermitianMatrix& hi, const HermitianMatrix& w,
                        const Schedule& schedule, Closure closure, double min_gap);

/// Lowest `levels` eigenpairs of H(epsilon_start), phases aligned to the
/// analytic s=0 vectors (coherent state, then the K displaced single
/// excitations, then numerical eigenvectors of H_I).
FlowState initial_conditions(std::span<const Complex> alphas, const TruncatedBasis& basis,
                             std::size_t levels, double epsilon_start, const HermitianMatrix& hp,
                             const HermitianMatrix& hi, const Schedule& schedule,
                             const TailPolicy& policy = {});

struct FlowTrajectory {
  std::vector<FlowState> states;  // at the requested output points, ascending in s
  double max_norm_drift = 0.0;
  double max_orthogonality_drift = 0.0;
  double min_gap = INFINITY;
  double min_gap_s = 0.0;
  std::size_t steps = 0;
  std::size_t rhs_evaluations = 0;
  std::vector<double> reseeds;  // s values where tracking restarted

  const FlowState& final_state() const { return states.back(); }
  /// State whose s is within 1e-12 of `s`; throws DomainError otherwise.
  const FlowState& at(double s) const;
};

/// Adaptive Dormand-Prince 5(4) integration of flow_rhs from initial.s to
/// config.end_s. Throws GapCollapseError, NormDriftError (drift > 1e-3), or
/// NumericError on step-size underflow.
FlowTrajectory integrate_flow(const FlowConfig& config, const HermitianMatrix& hp, const HermitianMatrix& hi,
                              const FlowState& initial);

struct ResidualRow {
  double s = 0.0;
  double max_energy_deviation = 0.0;
  double ground_energy_deviation = 0.0;
  double min_overlap = 1.0;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  double max_energy_deviation = 0.0;
  double ground_energy_deviation = 0.0;
  double min_overlap = 1.0;
};

/// Compares each trajectory state against a fresh diagonalization at its s.
ResidualReport flow_vs_diagonalization_residual(const FlowTrajectory& trajectory, const HermitianMatrix& hp,
                                                const HermitianMatrix& hi, const Schedule& schedule,
                                                const EigenOptions& options = {});

/// Polynomial (Neville) extrapolation of samples y(x) to x = 0.
double extrapolate_to_zero(std::span<const double> x, std::span<const double> y);

struct GroundLimit {
  std::vector<double> s;
  std::vector<double> e0;
  double value = 0.0;
};

/// lim_{s->1} E_0(s) from the trajectory samples at `s_points`.
GroundLimit estimate_ground_limit(const FlowTrajectory& trajectory, std::span<const double> s_points);

}  // namespace fockflow
