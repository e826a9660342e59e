#include "fockflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <Eigen/Eigenvalues>

#include "fockflow/error.hpp"

namespace fockflow {

std::size_t EvolutionConfig::resolved_slices() const {
  if (num_slices) return num_slices;
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(200.0 * total_time)));
}

namespace {

// exp(-i dt H) v via Lanczos with full reorthogonalization; the step is split
// until the standard a posteriori error estimate drops below `tol`.
StateVector krylov_step(const SparseMatrix& h, const StateVector& v, double dt, double tol) {
  constexpr Eigen::Index kMaxDim = 40;
  StateVector result = v;
  double remaining = dt;
  double tau = dt;
  while (remaining > 0.0) {
    tau = std::min(tau, remaining);
    const double beta0 = result.norm();
    const Eigen::Index n = h.rows();
    const Eigen::Index kmax = std::min<Eigen::Index>(kMaxDim, n);
    Eigen::MatrixXcd basis(n, kmax + 1);
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(kmax + 1, kmax + 1);
    basis.col(0) = result / beta0;
    Eigen::Index k = 0;
    double next_beta = 0.0;
    for (; k < kmax; ++k) {
      StateVector wv = h * basis.col(k);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j <= k; ++j) {
          const Complex c = basis.col(j).dot(wv);
          if (pass == 0 && j == k) tri(k, k) = c.real();
          wv -= c * basis.col(j);
        }
      next_beta = wv.norm();
      if (k + 1 < kmax + 1) {
        tri(k + 1, k) = tri(k, k + 1) = next_beta;
        if (next_beta > 1e-14) basis.col(k + 1) = wv / next_beta;
      }
      if (next_beta <= 1e-14) {
        ++k;
        break;
      }
    }
    const Eigen::Index dim = std::min(k, kmax);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri.topLeftCorner(dim, dim));
    const Eigen::VectorXcd phase =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -tau)).array().exp().matrix();
    const Eigen::VectorXcd coeff = es.eigenvectors().cast<Complex>() *
                                   phase.cwiseProduct(es.eigenvectors().row(0).transpose().cast<Complex>());
    const double err = next_beta <= 1e-14 ? 0.0 : beta0 * next_beta * std::abs(coeff[dim - 1]);
    if (err > tol && tau > dt * 1e-6) {
      tau *= 0.5;
      continue;
    }
    result = beta0 * (basis.leftCols(dim) * coeff);
    remaining -= tau;
  }
  return result;
}

}  // namespace

EvolutionResult evolve(const EvolutionConfig& config, const HermitianMatrix& hp, const HermitianMatrix& hi,
                       const StateVector& initial, const SpectrumSlice* convergence_reference) {
  if (!(config.total_time > 0.0)) throw DomainError("total time must be positive");
  if (!(hp.basis() == hi.basis())) throw DimensionError("operators live on different bases");
  if (initial.size() != static_cast<Eigen::Index>(hp.dimension()))
    throw DimensionError("initial state does not match the basis dimension");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw DomainError("initial state must have unit norm");

  const HermitianMatrix w = build_w(hp, hi);
  const bool dense = hp.dimension() <= config.dense_limit;
  const Eigen::MatrixXcd hi_dense = dense ? hi.dense() : Eigen::MatrixXcd();
  const Eigen::MatrixXcd w_dense = dense ? w.dense() : Eigen::MatrixXcd();

  auto run = [&](std::size_t slices) {
    const double dt = config.total_time / double(slices);
    StateVector psi = initial;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (std::size_t j = 0; j < slices; ++j) {
      const double f = config.schedule.value((double(j) + 0.5) / double(slices));
      if (dense) {
        es.compute(hi_dense + f * w_dense);
        const Eigen::VectorXcd phase =
            (es.eigenvalues().cast<Complex>() * Complex(0.0, -dt)).array().exp().matrix();
        psi = es.eigenvectors() * phase.cwiseProduct(es.eigenvectors().adjoint() * psi);
      } else {
        const SparseMatrix h = hi.sparse() + f * w.sparse();
        psi = krylov_step(h, psi, dt, 1e-12);
      }
    }
    return psi;
  };

  EvolutionResult out;
  out.slices = config.resolved_slices();
  out.final_state = run(out.slices);
  out.norm_drift = std::abs(out.final_state.norm() - 1.0);
  if (out.norm_drift > 1e-8) throw NumericError("evolution norm drift " + format_number(out.norm_drift));
  if (config.check_convergence) {
    if (!convergence_reference) throw DomainError("slice convergence check needs a reference slice");
    const StateVector fine = run(2 * out.slices);
    out.slice_convergence =
        std::abs(ground_overlap(fine, *convergence_reference) - ground_overlap(out.final_state, *convergence_reference));
  }
  return out;
}

double ground_overlap(const StateVector& final_state, const SpectrumSlice& slice, double multiplet_tolerance) {
  if (slice.levels() == 0) throw DomainError("slice holds no levels");
  if (slice.vectors.rows() != final_state.size()) throw DimensionError("slice and state dimensions differ");
  double p = 0.0;
  for (Eigen::Index q = 0; q < slice.energies.size(); ++q) {
    if (q > 0 && slice.energies[q] - slice.energies[0] >= multiplet_tolerance) break;
    p += std::norm(slice.vectors.col(q).dot(final_state));
  }
  return std::clamp(p, 0.0, 1.0);
}

std::size_t dominant_outcome(const StateVector& state) {
  Eigen::Index idx = 0;
  state.cwiseAbs2().maxCoeff(&idx);
  return static_cast<std::size_t>(idx);
}

std::vector<SweepPoint> adiabatic_sweep(const std::vector<double>& times, const EvolutionConfig& config_template,
                                        const HermitianMatrix& hp, const HermitianMatrix& hi,
                                        const StateVector& initial, const SpectrumSlice& end_slice,
                                        double multiplet_tolerance) {
  if (times.empty()) throw DomainError("sweep needs at least one total time");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1])) throw DomainError("sweep times must be ascending");

  std::vector<std::future<SweepPoint>> jobs;
  for (double t : times) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      EvolutionConfig cfg = config_template;
      cfg.total_time = t;
      const EvolutionResult r = evolve(cfg, hp, hi, initial);
      return SweepPoint{t, ground_overlap(r.final_state, end_slice, multiplet_tolerance), r.norm_drift, r.slices,
                        dominant_outcome(r.final_state)};
    }));
  }
  std::vector<SweepPoint> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace fockflow
