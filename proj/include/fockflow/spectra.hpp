#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockflow/error.hpp"
#include "fockflow/operators.hpp"

namespace fockflow {

enum class LevelOrder { ascending, tracked };

/// Lowest eigenpairs of H(s) at one value of s. Column q of `vectors` is |E_q>.
struct SpectrumSlice {
  double s = 0.0;
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  /// ascending: as returned by the eigensolver. tracked: column q continues
  /// level q of the predecessor slice (see gauge_fix), phases aligned.
  LevelOrder order = LevelOrder::ascending;
  double max_residual = 0.0;

  std::size_t levels() const noexcept { return static_cast<std::size_t>(energies.size()); }
};

struct EigenOptions {
  /// Dense Hermitian solver up to this dimension; shift-invert block iteration above.
  std::size_t dense_limit = 2048;
  /// Accepted eigenpair residual, relative to the operator norm bound.
  double relative_residual = 1e-9;
  std::size_t max_iterations = 500;
};

class EigensolverError : public NumericError {
 public:
  EigensolverError(const std::string& what, double achieved)
      : NumericError(what + " (achieved residual " + format_number(achieved) + ")"), achieved_(achieved) {}
  double achieved_residual() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class AmbiguousPairingError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Lowest `levels` eigenpairs, ascending. `s` is recorded in the slice.
SpectrumSlice instantaneous_spectrum(const HermitianMatrix& h, std::size_t levels, double s = 0.0,
                                     const EigenOptions& options = {});

/// Slice of H_I + f(s) W where W = hp - hi.
SpectrumSlice spectrum_at(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                          double s, std::size_t levels, const EigenOptions& options = {});

/// Relabels `current` so each level continues the predecessor level with the
/// largest overlap, then rotates phases so <prev_q|cur_q> is real and >= 0.
/// Throws AmbiguousPairingError when a level's two best overlaps differ by
/// less than 1e-6 (refine the grid).
SpectrumSlice gauge_fix(const SpectrumSlice& previous, const SpectrumSlice& current);

/// Degeneracy criterion shared by scans and flow: gap < 1e-8 * max(1, ||H||).
double degeneracy_threshold(double operator_norm);

/// Two-level prediction of the gap between levels l and l+1 at s0 + delta_s:
/// sqrt([D + ds f'(W_{l+1,l+1} - W_{l,l})]^2 + 4 ds^2 |f' W_{l,l+1}|^2),
/// with W_ij taken between the eigenvectors of `slice` (at s0).
double avoided_crossing_prediction(const SpectrumSlice& slice, const HermitianMatrix& w,
                                   const Schedule& schedule, double s0, double delta_s, std::size_t l);

struct GapReport {
  std::size_t pair = 0;
  std::vector<double> s;
  std::vector<double> gaps;  // E_{l+1} - E_l in ascending order at each s
  std::vector<Eigen::VectorXd> energies;
  double min_gap = 0.0;
  double min_gap_s = 0.0;
  double threshold = 0.0;  // smallest degeneracy threshold met on the grid
  bool degenerate = false;
  /// Tracked levels l and l+1 swapped order between neighbouring grid points.
  std::vector<double> crossings;
  /// Grid points where pairing was ambiguous and tracking restarted.
  std::vector<double> tracking_resets;
};

/// Scans the gap of pair (l, l+1) across `grid` (ascending, inside (0,1)).
GapReport min_gap_scan(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                       const std::vector<double>& grid, std::size_t l, const EigenOptions& options = {});

/// Uniform interior grid with `points` values s_j = j/(points+1).
std::vector<double> interior_grid(std::size_t points);

}  // namespace fockflow
