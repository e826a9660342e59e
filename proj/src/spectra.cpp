#include "fockflow/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace fockflow {

namespace {

double max_residual(const HermitianMatrix& h, const Eigen::VectorXd& e, const Eigen::MatrixXcd& v) {
  const Eigen::MatrixXcd hv = h.sparse() * v;
  double r = 0.0;
  for (Eigen::Index q = 0; q < e.size(); ++q) r = std::max(r, (hv.col(q) - e[q] * v.col(q)).norm());
  return r;
}

SpectrumSlice dense_spectrum(const HermitianMatrix& h, std::size_t levels) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense());
  if (es.info() != Eigen::Success) throw EigensolverError("dense eigensolver failed", INFINITY);
  const auto m = static_cast<Eigen::Index>(levels);
  SpectrumSlice out;
  out.energies = es.eigenvalues().head(m);
  out.vectors = es.eigenvectors().leftCols(m);
  return out;
}

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(x);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(x.rows(), x.cols());
}

// Block inverse iteration on (H - sigma)^{-1} with Rayleigh-Ritz on H.
SpectrumSlice iterative_spectrum(const HermitianMatrix& h, std::size_t levels, const EigenOptions& opt) {
  const auto n = static_cast<Eigen::Index>(h.dimension());
  const auto m = static_cast<Eigen::Index>(levels);
  const Eigen::Index p = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * m, m + 8));
  const double scale = std::max(1.0, h.norm_bound());
  const double tol = opt.relative_residual * scale;

  // Gershgorin lower bound for the initial shift.
  double sigma = INFINITY;
  for (Eigen::Index k = 0; k < n; ++k) {
    double off = 0.0, diag = 0.0;
    for (SparseMatrix::InnerIterator it(h.sparse(), k); it; ++it) {
      if (it.row() == it.col()) diag = it.value().real();
      else off += std::abs(it.value());
    }
    sigma = std::min(sigma, diag - off);
  }
  sigma -= 1e-3 * scale;

  SparseMatrix identity(n, n);
  identity.setIdentity();
  Eigen::SparseLU<SparseMatrix> lu;
  auto factor = [&](double shift) {
    SparseMatrix shifted = h.sparse() - Complex(shift) * identity;
    shifted.makeCompressed();
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) throw EigensolverError("shift-invert factorization failed", INFINITY);
  };
  factor(sigma);

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = Complex(normal(rng), normal(rng));
  x = orthonormalize(x);

  bool reshifted = false;
  double achieved = INFINITY;
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    x = orthonormalize(lu.solve(x));
    const Eigen::MatrixXcd hx = h.sparse() * x;
    Eigen::MatrixXcd projected = x.adjoint() * hx;
    projected = 0.5 * (projected + projected.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(projected);
    x = x * es.eigenvectors();
    const Eigen::MatrixXcd hv = hx * es.eigenvectors();
    const Eigen::VectorXd theta = es.eigenvalues();

    achieved = 0.0;
    for (Eigen::Index q = 0; q < m; ++q) achieved = std::max(achieved, (hv.col(q) - theta[q] * x.col(q)).norm());
    if (achieved <= tol) {
      SpectrumSlice out;
      out.energies = theta.head(m);
      out.vectors = x.leftCols(m);
      return out;
    }
    if (!reshifted && it >= 2) {
      // Move the shift just below the current lowest Ritz value.
      const double spread = theta[std::min<Eigen::Index>(m, p - 1)] - theta[0];
      sigma = theta[0] - std::max(0.1 * spread, 1e-6 * scale);
      factor(sigma);
      reshifted = true;
    }
  }
  throw EigensolverError("shift-invert iteration did not converge", achieved);
}

}  // namespace

SpectrumSlice instantaneous_spectrum(const HermitianMatrix& h, std::size_t levels, double s,
                                     const EigenOptions& options) {
  if (levels < 1 || levels > h.dimension()) throw DomainError("requested level count outside 1..dimension");
  SpectrumSlice out = h.dimension() <= options.dense_limit ? dense_spectrum(h, levels)
                                                           : iterative_spectrum(h, levels, options);
  out.s = s;
  out.order = LevelOrder::ascending;
  out.max_residual = max_residual(h, out.energies, out.vectors);
  const double bound = options.relative_residual * std::max(1.0, h.norm_bound());
  if (!(out.max_residual <= bound)) throw EigensolverError("eigenpair residual above bound", out.max_residual);
  return out;
}

SpectrumSlice spectrum_at(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                          double s, std::size_t levels, const EigenOptions& options) {
  return instantaneous_spectrum(interpolate(hp, hi, schedule, s), levels, s, options);
}

SpectrumSlice gauge_fix(const SpectrumSlice& previous, const SpectrumSlice& current) {
  if (previous.levels() != current.levels() || previous.vectors.rows() != current.vectors.rows())
    throw DimensionError("slices differ in level count or dimension");
  const auto m = static_cast<Eigen::Index>(current.levels());
  const Eigen::MatrixXcd overlap = previous.vectors.adjoint() * current.vectors;
  const Eigen::MatrixXd mag = overlap.cwiseAbs();

  constexpr double kResolution = 1e-6;
  constexpr double kSignificant = 1e-3;
  for (Eigen::Index p = 0; p < m && m > 1; ++p) {
    std::vector<double> row(static_cast<std::size_t>(m));
    for (Eigen::Index q = 0; q < m; ++q) row[q] = mag(p, q);
    std::partial_sort(row.begin(), row.begin() + 2, row.end(), std::greater<>());
    if (row[0] >= kSignificant && row[0] - row[1] < kResolution)
      throw AmbiguousPairingError("ambiguous level pairing at s=" + format_number(current.s) +
                                  " for level " + std::to_string(p) + "; refine the s grid");
  }

  // Greedy maximal-overlap matching over all (prev, cur) pairs.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q) cells.emplace_back(p, q);
  std::stable_sort(cells.begin(), cells.end(),
                   [&](auto a, auto b) { return mag(a.first, a.second) > mag(b.first, b.second); });
  std::vector<Eigen::Index> partner(m, -1);
  std::vector<bool> used(m, false);
  for (auto [p, q] : cells) {
    if (partner[p] >= 0 || used[q]) continue;
    partner[p] = q;
    used[q] = true;
  }

  SpectrumSlice out = current;
  out.order = LevelOrder::tracked;
  for (Eigen::Index p = 0; p < m; ++p) {
    const Eigen::Index q = partner[p];
    Complex phase = 1.0;
    if (mag(p, q) > 0.0) phase = std::conj(overlap(p, q)) / mag(p, q);
    out.energies[p] = current.energies[q];
    out.vectors.col(p) = current.vectors.col(q) * phase;
  }
  return out;
}

double degeneracy_threshold(double operator_norm) { return 1e-8 * std::max(1.0, operator_norm); }

double avoided_crossing_prediction(const SpectrumSlice& slice, const HermitianMatrix& w,
                                   const Schedule& schedule, double s0, double delta_s, std::size_t l) {
  if (l + 1 >= slice.levels()) throw DomainError("pair (l, l+1) outside the slice");
  if (std::abs(delta_s) > 1e-2) throw DomainError("delta_s must not exceed 1e-2");
  const auto a = static_cast<Eigen::Index>(l);
  const StateVector el = slice.vectors.col(a), eu = slice.vectors.col(a + 1);
  const double w_ll = w.matrix_element(el, el).real();
  const double w_uu = w.matrix_element(eu, eu).real();
  const Complex w_lu = w.matrix_element(el, eu);
  const double fp = schedule.derivative(s0);
  const double gap = slice.energies[a + 1] - slice.energies[a];
  const double diag = gap + delta_s * fp * (w_uu - w_ll);
  return std::sqrt(diag * diag + 4.0 * delta_s * delta_s * std::norm(fp * w_lu));
}

GapReport min_gap_scan(const HermitianMatrix& hp, const HermitianMatrix& hi, const Schedule& schedule,
                       const std::vector<double>& grid, std::size_t l, const EigenOptions& options) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0 && grid[j] < 1.0)) throw DomainError("gap scan grid must lie inside (0,1)");
    if (j && !(grid[j] > grid[j - 1])) throw DomainError("gap scan grid must be ascending");
  }
  const std::size_t levels = std::min(hp.dimension(), l + 6);
  if (l + 2 > levels) throw DomainError("pair index exceeds basis dimension");

  GapReport rep;
  rep.pair = l;
  rep.min_gap = INFINITY;
  rep.threshold = INFINITY;
  const auto a = static_cast<Eigen::Index>(l);
  SpectrumSlice tracked;
  bool have_prev = false;
  for (double s : grid) {
    const HermitianMatrix h = interpolate(hp, hi, schedule, s);
    SpectrumSlice raw = instantaneous_spectrum(h, levels, s, options);
    const double gap = raw.energies[a + 1] - raw.energies[a];
    const double thr = degeneracy_threshold(h.norm_bound());
    rep.s.push_back(s);
    rep.gaps.push_back(gap);
    rep.energies.push_back(raw.energies);
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.min_gap_s = s;
    }
    rep.threshold = std::min(rep.threshold, thr);
    if (gap < thr) rep.degenerate = true;

    if (!have_prev) {
      tracked = std::move(raw);
      have_prev = true;
      continue;
    }
    SpectrumSlice next;
    try {
      next = gauge_fix(tracked, raw);
    } catch (const AmbiguousPairingError&) {
      rep.tracking_resets.push_back(s);
      tracked = std::move(raw);
      continue;
    }
    const double before = tracked.energies[a + 1] - tracked.energies[a];
    const double after = next.energies[a + 1] - next.energies[a];
    if ((before > 0.0) != (after > 0.0)) {
      // Tracked pair swapped order: a crossing between the two grid points.
      const double t = before / (before - after);
      rep.crossings.push_back(tracked.s + t * (s - tracked.s));
      rep.degenerate = true;
    }
    tracked = std::move(next);
  }
  if (!rep.crossings.empty()) {
    rep.min_gap = 0.0;
    rep.min_gap_s = rep.crossings.front();
  }
  return rep;
}

std::vector<double> interior_grid(std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t j = 0; j < points; ++j) g[j] = double(j + 1) / double(points + 1);
  return g;
}

}  // namespace fockflow
