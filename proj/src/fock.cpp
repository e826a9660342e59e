#include "fockflow/fock.hpp"

#include <cmath>
#include <string>

#include "fockflow/error.hpp"

namespace fockflow {

TruncatedBasis::TruncatedBasis(std::size_t num_modes, unsigned cutoff, std::size_t max_dimension)
    : modes_(num_modes), cutoff_(cutoff) {
  if (num_modes < 1) throw DomainError("basis needs at least one mode");
  if (cutoff < 1) throw DomainError("cutoff must be at least 1");
  stride_.assign(num_modes, 1);
  std::size_t dim = 1;
  for (std::size_t i = 0; i < num_modes; ++i) {
    if (dim > max_dimension / (cutoff + 1))
      throw BudgetError("basis dimension (" + std::to_string(cutoff + 1) + ")^" +
                        std::to_string(num_modes) + " exceeds budget " + std::to_string(max_dimension));
    dim *= cutoff + 1;
  }
  dim_ = dim;
  for (std::size_t i = num_modes - 1; i-- > 0;) stride_[i] = stride_[i + 1] * (cutoff + 1);
}

Occupation TruncatedBasis::tuple_of(std::size_t index) const {
  if (index >= dim_) throw DomainError("basis index out of range");
  Occupation n(modes_);
  for (std::size_t i = 0; i < modes_; ++i) n[i] = occupation(index, i);
  return n;
}

std::size_t TruncatedBasis::index_of(std::span<const unsigned> occupation) const {
  if (occupation.size() != modes_) throw DimensionError("occupation tuple length does not match basis");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < modes_; ++i) {
    if (occupation[i] > cutoff_) throw DomainError("occupation exceeds cutoff");
    idx += occupation[i] * stride_[i];
  }
  return idx;
}

TruncatedBasis enumerate_basis(std::size_t num_modes, unsigned cutoff, std::size_t max_dimension) {
  return TruncatedBasis(num_modes, cutoff, max_dimension);
}

namespace {

// Per-mode coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..N, via
// the recursion c_{n+1} = c_n * a / sqrt(n+1).
std::vector<Complex> mode_amplitudes(Complex alpha, unsigned cutoff) {
  std::vector<Complex> c(cutoff + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (unsigned n = 0; n < cutoff; ++n) c[n + 1] = c[n] * alpha / std::sqrt(double(n + 1));
  return c;
}

void check_modes(std::span<const Complex> alphas, const TruncatedBasis& basis) {
  if (alphas.size() != basis.num_modes())
    throw DimensionError("got " + std::to_string(alphas.size()) + " displacements for " +
                         std::to_string(basis.num_modes()) + " modes");
}

TruncatedVector finish(StateVector v, const TailPolicy& policy) {
  const double mass = v.squaredNorm();
  TruncatedVector out{std::move(v), std::max(0.0, 1.0 - mass)};
  if (out.tail_mass > policy.max_tail_mass)
    throw DomainError("coherent tail mass " + format_number(out.tail_mass) +
                      " exceeds tolerance; raise the cutoff or reduce |alpha|");
  out.coefficients /= std::sqrt(mass);
  return out;
}

StateVector raw_coherent(std::span<const Complex> alphas, const TruncatedBasis& basis) {
  std::vector<std::vector<Complex>> amp;
  for (auto a : alphas) amp.push_back(mode_amplitudes(a, basis.cutoff()));
  StateVector v(basis.dimension());
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    Complex c = 1.0;
    for (std::size_t i = 0; i < basis.num_modes(); ++i) c *= amp[i][basis.occupation(idx, i)];
    v[idx] = c;
  }
  return v;
}

}  // namespace

TruncatedVector coherent_coefficients(std::span<const Complex> alphas, const TruncatedBasis& basis,
                                      const TailPolicy& policy) {
  check_modes(alphas, basis);
  return finish(raw_coherent(alphas, basis), policy);
}

TruncatedVector excited_initial_coefficients(std::span<const Complex> alphas,
                                             const TruncatedBasis& basis, std::size_t mode,
                                             const TailPolicy& policy) {
  check_modes(alphas, basis);
  if (mode >= basis.num_modes()) throw DomainError("mode index out of range");
  const StateVector c0 = raw_coherent(alphas, basis);
  const std::size_t stride = basis.stride(mode);
  StateVector v(basis.dimension());
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const unsigned n = basis.occupation(idx, mode);
    v[idx] = -std::conj(alphas[mode]) * c0[idx];
    if (n != 0) v[idx] += std::sqrt(double(n)) * c0[idx - stride];
  }
  // (a^dagger - conj(alpha))|alpha> has unit norm in the full Fock space.
  return finish(std::move(v), policy);
}

double coherent_window_mass(std::span<const Complex> alphas, unsigned cutoff) {
  double mass = 1.0;
  for (auto a : alphas) {
    const double x = std::norm(a);
    double term = std::exp(-x), sum = 0.0;
    for (unsigned n = 0; n <= cutoff; ++n) {
      sum += term;
      term *= x / double(n + 1);
    }
    mass *= sum;
  }
  return mass;
}

}  // namespace fockflow
