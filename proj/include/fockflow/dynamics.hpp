#pragma once

#include <cstddef>
#include <vector>

#include "fockflow/fock.hpp"
#include "fockflow/operators.hpp"
#include "fockflow/spectra.hpp"

namespace fockflow {

struct EvolutionConfig {
  double total_time = 10.0;
  /// 0 selects max(1000, 200 T).
  std::size_t num_slices = 0;
  Schedule schedule{};
  /// Per-slice propagation uses exact eigendecomposition up to this dimension
  /// and a Lanczos approximation of the exponential above it.
  std::size_t dense_limit = 2048;
  /// When set, the run is repeated with twice the slices and the change in the
  /// ground overlap against `convergence_reference` is reported.
  bool check_convergence = false;

  std::size_t resolved_slices() const;
};

struct EvolutionResult {
  StateVector final_state;
  std::size_t slices = 0;
  double norm_drift = 0.0;
  /// |P(2n) - P(n)| when convergence was checked, otherwise NaN.
  double slice_convergence = NAN;
};

/// i d/dt psi = H(t/T) psi, realized as the midpoint product of per-slice
/// exponentials exp(-i dt H(s_mid)). Throws NumericError on norm drift > 1e-8.
EvolutionResult evolve(const EvolutionConfig& config, const HermitianMatrix& hp, const HermitianMatrix& hi,
                       const StateVector& initial, const SpectrumSlice* convergence_reference = nullptr);

/// |<E_0|psi>|^2 summed over every level within `multiplet_tolerance` of E_0.
double ground_overlap(const StateVector& final_state, const SpectrumSlice& slice,
                      double multiplet_tolerance = 1e-8);

/// Basis index carrying the largest |psi_n|^2.
std::size_t dominant_outcome(const StateVector& state);

struct SweepPoint {
  double total_time = 0.0;
  double probability = 0.0;
  double norm_drift = 0.0;
  std::size_t slices = 0;
  std::size_t dominant_index = 0;
};

/// evolve + ground_overlap for each T; runs execute concurrently.
std::vector<SweepPoint> adiabatic_sweep(const std::vector<double>& times, const EvolutionConfig& config_template,
                                        const HermitianMatrix& hp, const HermitianMatrix& hi,
                                        const StateVector& initial, const SpectrumSlice& end_slice,
                                        double multiplet_tolerance = 1e-8);

}  // namespace fockflow
