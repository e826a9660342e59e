#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fockflow {

using Complex = std::complex<double>;
using Occupation = std::vector<unsigned>;
using StateVector = Eigen::VectorXcd;

/// Product basis |n_1 .. n_K> with every n_i in 0..cutoff, enumerated
/// lexicographically (the last mode varies fastest).
class TruncatedBasis {
 public:
  static constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 22;

  TruncatedBasis(std::size_t num_modes, unsigned cutoff,
                 std::size_t max_dimension = kDefaultMaxDimension);

  std::size_t num_modes() const noexcept { return modes_; }
  unsigned cutoff() const noexcept { return cutoff_; }
  std::size_t dimension() const noexcept { return dim_; }

  Occupation tuple_of(std::size_t index) const;
  std::size_t index_of(std::span<const unsigned> occupation) const;

  /// Occupation of `mode` in basis state `index`.
  unsigned occupation(std::size_t index, std::size_t mode) const noexcept {
    return static_cast<unsigned>((index / stride_[mode]) % (cutoff_ + 1));
  }
  /// Index offset between |..n_i..> and |..n_i+1..>.
  std::size_t stride(std::size_t mode) const noexcept { return stride_[mode]; }

  friend bool operator==(const TruncatedBasis& a, const TruncatedBasis& b) {
    return a.modes_ == b.modes_ && a.cutoff_ == b.cutoff_;
  }

 private:
  std::size_t modes_;
  unsigned cutoff_;
  std::size_t dim_;
  std::vector<std::size_t> stride_;
};

/// Enumerates the basis; throws BudgetError when (N+1)^K > max_dimension.
TruncatedBasis enumerate_basis(std::size_t num_modes, unsigned cutoff,
                               std::size_t max_dimension = TruncatedBasis::kDefaultMaxDimension);

/// A window-restricted vector together with the probability mass its
/// untruncated counterpart carries outside the window.
struct TruncatedVector {
  StateVector coefficients;  // renormalized to unit norm
  double tail_mass = 0.0;    // 1 - (norm before renormalization)^2
};

struct TailPolicy {
  /// Larger tails throw DomainError: the cutoff is too small for |alpha|.
  double max_tail_mass = 5e-2;
};

/// Coherent product state prod_i e^{-|a_i|^2/2} a_i^{n_i} / sqrt(n_i!).
TruncatedVector coherent_coefficients(std::span<const Complex> alphas, const TruncatedBasis& basis,
                                      const TailPolicy& policy = {});

/// (a_mode^dagger - conj(alpha_mode)) applied to the coherent product state,
/// the first excited multiplet of the displaced oscillator. `mode` is 0-based.
TruncatedVector excited_initial_coefficients(std::span<const Complex> alphas,
                                             const TruncatedBasis& basis, std::size_t mode,
                                             const TailPolicy& policy = {});

/// Window mass of the coherent state before renormalization, computed mode by
/// mode as prod_i sum_{n<=N} e^{-|a_i|^2} |a_i|^{2n} / n!.
double coherent_window_mass(std::span<const Complex> alphas, unsigned cutoff);

}  // namespace fockflow
