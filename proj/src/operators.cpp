#include "fockflow/operators.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fockflow/error.hpp"

namespace fockflow {

namespace {

void require_same_basis(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (!(a.basis() == b.basis())) throw DimensionError("operators live on different bases");
}

}  // namespace

HermitianMatrix::HermitianMatrix(TruncatedBasis basis, std::span<const Entry> upper)
    : basis_(std::move(basis)) {
  const auto n = static_cast<Eigen::Index>(basis_.dimension());
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(2 * upper.size());
  for (const auto& e : upper) {
    if (e.row > e.col) throw DomainError("HermitianMatrix assembly takes upper-triangle entries only");
    if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
      throw NumericError("non-finite matrix entry");
    if (e.row == e.col) {
      trip.emplace_back(e.row, e.col, Complex(e.value.real(), 0.0));
    } else {
      trip.emplace_back(e.row, e.col, e.value);
      trip.emplace_back(e.col, e.row, std::conj(e.value));
    }
  }
  m_.resize(n, n);
  m_.setFromTriplets(trip.begin(), trip.end());
  m_.makeCompressed();
}

double HermitianMatrix::norm_bound() const {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(m_, k); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

bool HermitianMatrix::is_diagonal() const {
  for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m_, k); it; ++it)
      if (it.row() != it.col() && it.value() != Complex(0.0)) return false;
  return true;
}

HermitianMatrix HermitianMatrix::combine(double a, const HermitianMatrix& A, double b,
                                         const HermitianMatrix& B) {
  require_same_basis(A, B);
  SparseMatrix m = a * A.m_ + b * B.m_;
  m.makeCompressed();
  return HermitianMatrix(A.basis_, std::move(m));
}

// ---------------------------------------------------------------------------

Schedule Schedule::parse(const std::string& name) {
  if (name == "linear") return Schedule(Kind::linear);
  if (name == "smoothstep") return Schedule(Kind::smoothstep);
  throw InputError("unknown schedule '" + name + "' (expected linear or smoothstep)");
}

std::string Schedule::name() const { return kind_ == Kind::linear ? "linear" : "smoothstep"; }

double Schedule::value(double s) const {
  if (kind_ == Kind::linear) return s;
  return s * s * (3.0 - 2.0 * s);
}

double Schedule::derivative(double s) const {
  if (kind_ == Kind::linear) return 1.0;
  return 6.0 * s * (1.0 - s);
}

// ---------------------------------------------------------------------------

HermitianMatrix build_hp(const DiophantinePolynomial& poly, const TruncatedBasis& basis, AssemblyLog* log) {
  if (poly.num_vars() != basis.num_modes())
    throw DimensionError("polynomial has " + std::to_string(poly.num_vars()) + " variables, basis has " +
                         std::to_string(basis.num_modes()) + " modes");
  static const BigInt kExactLimit = BigInt(1) << 53;
  std::vector<HermitianMatrix::Entry> diag;
  diag.reserve(basis.dimension());
  std::size_t inexact = 0;
  BigInt worst = 0;
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    const Occupation n = basis.tuple_of(idx);
    const BigInt d2 = poly.evaluate_squared(n);
    if (d2 > kExactLimit) {
      ++inexact;
      if (d2 > worst) worst = d2;
    }
    diag.push_back({idx, idx, Complex(d2.convert_to<double>(), 0.0)});
  }
  if (inexact && log)
    log->warnings.push_back(std::to_string(inexact) + " diagonal entries of H_P exceed 2^53 (largest " +
                            worst.str() + "); converted with rounding");
  return HermitianMatrix(basis, diag);
}

HermitianMatrix build_hi(std::span<const Complex> alphas, const TruncatedBasis& basis) {
  if (alphas.size() != basis.num_modes())
    throw DimensionError("got " + std::to_string(alphas.size()) + " displacements for " +
                         std::to_string(basis.num_modes()) + " modes");
  double shift = 0.0;
  for (auto a : alphas) shift += std::norm(a);

  std::vector<HermitianMatrix::Entry> upper;
  upper.reserve(basis.dimension() * (1 + basis.num_modes()));
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx) {
    double diag = shift;
    for (std::size_t i = 0; i < basis.num_modes(); ++i) {
      const unsigned n = basis.occupation(idx, i);
      diag += n;
      // <..n_i+1..| H_I |..n_i..> = -alpha_i sqrt(n_i+1); couplings past the cutoff are dropped.
      if (n < basis.cutoff() && alphas[i] != Complex(0.0))
        upper.push_back({idx, idx + basis.stride(i), -std::conj(alphas[i]) * std::sqrt(double(n + 1))});
    }
    upper.push_back({idx, idx, Complex(diag, 0.0)});
  }
  return HermitianMatrix(basis, upper);
}

HermitianMatrix build_w(const HermitianMatrix& hp, const HermitianMatrix& hi) {
  return HermitianMatrix::combine(1.0, hp, -1.0, hi);
}

HermitianMatrix interpolate(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                            double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("interpolation parameter s must lie in [0,1]");
  const double f = schedule.value(s);
  if (f == 0.0) return HermitianMatrix::combine(1.0, hi, 0.0, hp);
  if (f == 1.0) return HermitianMatrix::combine(0.0, hi, 1.0, hp);
  return HermitianMatrix::combine(1.0 - f, hi, f, hp);
}

HermitianMatrix perturbed_hp(const HermitianMatrix& hp, std::span<const Complex> epsilons) {
  const TruncatedBasis& basis = hp.basis();
  if (epsilons.size() != basis.num_modes())
    throw DimensionError("got " + std::to_string(epsilons.size()) + " perturbation amplitudes for " +
                         std::to_string(basis.num_modes()) + " modes");
  for (auto e : epsilons)
    if (std::abs(e) > 0.1) throw DomainError("perturbation amplitude |eps| must not exceed 0.1");

  std::vector<HermitianMatrix::Entry> upper;
  for (Eigen::Index k = 0; k < hp.sparse().outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(hp.sparse(), k); it; ++it)
      if (it.row() <= it.col())
        upper.push_back({std::size_t(it.row()), std::size_t(it.col()), it.value()});
  for (std::size_t idx = 0; idx < basis.dimension(); ++idx)
    for (std::size_t i = 0; i < basis.num_modes(); ++i) {
      const unsigned n = basis.occupation(idx, i);
      // eps a^dagger |n> = eps sqrt(n+1) |n+1>, so the upper entry <n|.|n+1> is conj(eps) sqrt(n+1).
      if (n < basis.cutoff() && epsilons[i] != Complex(0.0))
        upper.push_back({idx, idx + basis.stride(i), std::conj(epsilons[i]) * std::sqrt(double(n + 1))});
    }
  return HermitianMatrix(basis, upper);
}

double commutator_norm(const HermitianMatrix& hp, const HermitianMatrix& hi) {
  require_same_basis(hp, hi);
  SparseMatrix c = hp.sparse() * hi.sparse() - hi.sparse() * hp.sparse();
  return c.norm();
}

void write_coordinate_list(std::ostream& out, const HermitianMatrix& m) {
  out << "# dimension " << m.dimension() << " modes " << m.basis().num_modes() << " cutoff "
      << m.basis().cutoff() << "\n";
  const auto old = out.precision(17);
  for (Eigen::Index k = 0; k < m.sparse().outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m.sparse(), k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  out.precision(old);
}

}  // namespace fockflow
