#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fockflow/fock.hpp"
#include "fockflow/polynomial.hpp"

namespace fockflow {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Sparse Hermitian operator on a truncated basis.
///
/// Assembly takes the diagonal and the strict upper triangle and mirrors the
/// latter, so entry(i,j) == conj(entry(j,i)) holds bit for bit.
class HermitianMatrix {
 public:
  struct Entry {
    std::size_t row, col;  // row <= col
    Complex value;
  };

  HermitianMatrix(TruncatedBasis basis, std::span<const Entry> upper);

  const TruncatedBasis& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept { return basis_.dimension(); }
  const SparseMatrix& sparse() const noexcept { return m_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(m_); }
  Complex entry(std::size_t row, std::size_t col) const { return m_.coeff(row, col); }

  StateVector apply(const StateVector& v) const { return m_ * v; }
  /// <u|H|v>
  Complex matrix_element(const StateVector& u, const StateVector& v) const { return u.dot(m_ * v); }
  /// Max absolute row sum; an upper bound on the spectral norm.
  double norm_bound() const;
  bool is_diagonal() const;

  /// a*A + b*B on the same basis.
  static HermitianMatrix combine(double a, const HermitianMatrix& A, double b, const HermitianMatrix& B);

 private:
  HermitianMatrix(TruncatedBasis basis, SparseMatrix m) : basis_(std::move(basis)), m_(std::move(m)) {}

  TruncatedBasis basis_;
  SparseMatrix m_;
};

/// Interpolation profile f(s) with f(0)=0, f(1)=1, f' > 0 on (0,1).
class Schedule {
 public:
  enum class Kind { linear, smoothstep };

  explicit Schedule(Kind kind = Kind::smoothstep) : kind_(kind) {}
  static Schedule parse(const std::string& name);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double value(double s) const;
  double derivative(double s) const;

 private:
  Kind kind_;
};

/// Diagnostics emitted while converting exact D(n)^2 values to doubles.
struct AssemblyLog {
  std::vector<std::string> warnings;
};

/// Diagonal H_P with entries D(n)^2. Values above 2^53 are rounded and logged.
HermitianMatrix build_hp(const DiophantinePolynomial& poly, const TruncatedBasis& basis,
                         AssemblyLog* log = nullptr);

/// sum_i (a_i^dagger - conj(alpha_i))(a_i - alpha_i), projected onto the window.
HermitianMatrix build_hi(std::span<const Complex> alphas, const TruncatedBasis& basis);

/// W = H_P - H_I.
HermitianMatrix build_w(const HermitianMatrix& hp, const HermitianMatrix& hi);

/// H_I + f(s) W.
HermitianMatrix interpolate(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                            double s);

/// H_P + sum_i (eps_i a_i^dagger + conj(eps_i) a_i); every |eps_i| must be <= 0.1.
HermitianMatrix perturbed_hp(const HermitianMatrix& hp, std::span<const Complex> epsilons);

/// Frobenius norm of [H_P, H_I].
double commutator_norm(const HermitianMatrix& hp, const HermitianMatrix& hi);

/// Coordinate-list dump: one `row col re im` line per stored entry.
void write_coordinate_list(std::ostream& out, const HermitianMatrix& m);

}  // namespace fockflow
