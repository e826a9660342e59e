#include "fockflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace fockflow {

Closure parse_closure(const std::string& name) {
  if (name == "resolvent") return Closure::resolvent;
  if (name == "tracked") return Closure::tracked;
  throw InputError("unknown closure '" + name + "' (expected resolvent or tracked)");
}

std::string to_string(Closure c) { return c == Closure::resolvent ? "resolvent" : "tracked"; }

void FlowConfig::validate() const {
  if (!(epsilon_start > 0.0 && epsilon_start < end_s && end_s < 1.0))
    throw DomainError("flow needs 0 < epsilon_start < end_s < 1");
  if (levels < 2) throw DomainError("flow needs at least two tracked levels");
  if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw DomainError("integrator tolerances must be positive");
  for (double s : output_s)
    if (s < epsilon_start || s > end_s) throw DomainError("flow output point outside [epsilon_start, end_s]");
}

namespace {

void measure(FlowState& st) {
  const Eigen::MatrixXcd gram = st.vectors.adjoint() * st.vectors;
  const auto m = gram.rows();
  st.norm_drift = 0.0;
  st.orthogonality_drift = 0.0;
  st.min_gap = INFINITY;
  for (Eigen::Index q = 0; q < m; ++q) {
    st.norm_drift = std::max(st.norm_drift, std::abs(std::sqrt(gram(q, q).real()) - 1.0));
    for (Eigen::Index l = 0; l < m; ++l)
      if (l != q) {
        st.orthogonality_drift = std::max(st.orthogonality_drift, std::abs(gram(l, q)));
        st.min_gap = std::min(st.min_gap, std::abs(st.energies[q] - st.energies[l]));
      }
  }
}

// Packed ODE state: [E_0..E_{M-1}, C as interleaved (re, im) column-major].
using Packed = std::vector<double>;

Packed pack(const FlowState& st) {
  const auto m = st.energies.size();
  Packed x(static_cast<std::size_t>(m + 2 * st.vectors.size()));
  Eigen::Map<Eigen::VectorXd>(x.data(), m) = st.energies;
  Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<Complex*>(x.data() + m), st.vectors.rows(), m) = st.vectors;
  return x;
}

FlowState unpack(const Packed& x, double s, Eigen::Index dim, Eigen::Index m) {
  FlowState st;
  st.s = s;
  st.energies = Eigen::Map<const Eigen::VectorXd>(x.data(), m);
  st.vectors = Eigen::Map<const Eigen::MatrixXcd>(reinterpret_cast<const Complex*>(x.data() + m), dim, m);
  return st;
}

}  // namespace

namespace {

// Evaluates the flow equations; caches dense copies of H_I and W for the
// resolvent closure.
class FlowEvaluator {
 public:
  FlowEvaluator(const HermitianMatrix& hi, const HermitianMatrix& w, const Schedule& schedule, Closure closure,
                double min_gap)
      : w_(w), schedule_(schedule), closure_(closure), threshold_(min_gap) {
    if (!(hi.basis() == w.basis())) throw DimensionError("operators live on different bases");
    if (closure == Closure::resolvent) {
      hi_dense_ = hi.dense();
      w_dense_ = w.dense();
    }
  }

  FlowDerivative operator()(const FlowState& state) const {
    const auto m = static_cast<Eigen::Index>(state.levels());
    const auto dim = static_cast<Eigen::Index>(w_.dimension());
    if (state.vectors.rows() != dim || state.vectors.cols() != m)
      throw DimensionError("flow state shape does not match operators");

    const Eigen::MatrixXcd& c = state.vectors;
    const Eigen::MatrixXcd wc = w_.sparse() * c;
    const Eigen::MatrixXcd wm = c.adjoint() * wc;  // wm(l,q) = <E_l|W|E_q>
    const double fp = schedule_.derivative(state.s);

    FlowDerivative d;
    d.energies.resize(m);
    Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(m, m);
    for (Eigen::Index q = 0; q < m; ++q) {
      d.energies[q] = fp * wm(q, q).real();
      for (Eigen::Index l = 0; l < m; ++l) {
        if (l == q) continue;
        const double gap = state.energies[q] - state.energies[l];
        if (!(std::abs(gap) >= threshold_)) throw GapCollapseError(state.s, std::abs(gap));
        coupling(l, q) = wm(l, q) / gap;
      }
    }
    d.vectors = c * coupling;

    if (closure_ == Closure::resolvent && m < dim) {
      // Remainder of the sum over the untracked spectrum:
      //   sum_{l >= M} <E_l|W|E_q>/(E_q - E_l) |E_l> = Q (E_q - Q H Q)^{-1} Q W |E_q>,
      // solved as [E_q Q - Q H Q + P] x = Q W |E_q>, block diagonal in P (+) Q.
      // Q H Q = H - C (HC)^H - HC C^H + C (C^H H C) C^H, all rank-M updates.
      Eigen::MatrixXcd qhq = hi_dense_ + schedule_.value(state.s) * w_dense_;
      const Eigen::MatrixXcd hc = qhq * c;
      const Eigen::MatrixXcd chc = c.adjoint() * hc;
      const Eigen::MatrixXcd hc_q = hc - 0.5 * c * chc;
      qhq.noalias() -= c * hc_q.adjoint();
      qhq.noalias() -= hc_q * c.adjoint();
      const Eigen::MatrixXcd p = c * c.adjoint();
      const Eigen::MatrixXcd qwc = wc - c * wm;
      Eigen::MatrixXcd rem(dim, m);
      for (Eigen::Index q = 0; q < m; ++q) {
        const double e = state.energies[q];
        Eigen::MatrixXcd a = (1.0 - e) * p - qhq;
        a.diagonal().array() += e;
        rem.col(q) = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).solve(qwc.col(q));
      }
      // The remainder lives in Q; drop the P component left by roundoff and drift.
      rem -= c * (c.adjoint() * rem);
      d.vectors += rem;
    }
    d.vectors *= fp;
    return d;
  }

  double threshold() const noexcept { return threshold_; }

 private:
  const HermitianMatrix& w_;
  Schedule schedule_;
  Closure closure_;
  double threshold_;
  Eigen::MatrixXcd hi_dense_, w_dense_;
};

}  // namespace

FlowDerivative flow_rhs(const FlowState& state, const HermitianMatrix& hi, const HermitianMatrix& w,
                        const Schedule& schedule, Closure closure, double min_gap) {
  return FlowEvaluator(hi, w, schedule, closure, min_gap)(state);
}

FlowState initial_conditions(std::span<const Complex> alphas, const TruncatedBasis& basis,
                             std::size_t levels, double epsilon_start, const HermitianMatrix& hp,
                             const HermitianMatrix& hi, const Schedule& schedule, const TailPolicy& policy) {
  if (levels < 1 || levels > basis.dimension()) throw DomainError("tracked level count outside 1..dimension");
  if (!(hp.basis() == basis) || !(hi.basis() == basis)) throw DimensionError("operators live on another basis");
  const auto m = static_cast<Eigen::Index>(levels);

  // Reference vectors at s=0.
  SpectrumSlice ref = instantaneous_spectrum(hi, levels, 0.0);
  ref.vectors.col(0) = coherent_coefficients(alphas, basis, policy).coefficients;
  for (std::size_t i = 0; i < basis.num_modes() && Eigen::Index(i + 1) < m; ++i)
    ref.vectors.col(Eigen::Index(i + 1)) = excited_initial_coefficients(alphas, basis, i, policy).coefficients;

  SpectrumSlice start = spectrum_at(hp, hi, schedule, epsilon_start, levels);
  const Eigen::MatrixXcd overlap = ref.vectors.adjoint() * start.vectors;
  const auto multiplet_end = std::min<Eigen::Index>(m, Eigen::Index(basis.num_modes()) + 1);
  for (Eigen::Index q = 0; q < m; ++q) {
    // Within the split first-excited multiplet, align with the best analytic partner.
    Eigen::Index partner = q;
    if (q >= 1 && q < multiplet_end) {
      overlap.col(q).segment(1, multiplet_end - 1).cwiseAbs().maxCoeff(&partner);
      partner += 1;
    }
    const Complex o = overlap(partner, q);
    if (std::abs(o) < 1e-10) {
      if (q < multiplet_end)
        throw NumericError("cannot align level " + std::to_string(q) + " with the analytic s=0 vectors");
      continue;
    }
    start.vectors.col(q) *= std::conj(o) / std::abs(o);
  }

  FlowState st;
  st.s = epsilon_start;
  st.energies = start.energies;
  st.vectors = start.vectors;
  measure(st);
  return st;
}

const FlowState& FlowTrajectory::at(double s) const {
  for (const auto& st : states)
    if (std::abs(st.s - s) <= 1e-12) return st;
  throw DomainError("trajectory has no state at s=" + format_number(s));
}

FlowTrajectory integrate_flow(const FlowConfig& config, const HermitianMatrix& hp, const HermitianMatrix& hi,
                              const FlowState& initial) {
  config.validate();
  if (!(hp.basis() == hi.basis())) throw DimensionError("operators live on different bases");
  if (commutator_norm(hp, hi) == 0.0)
    throw DomainError("H_P and H_I commute; the interpolation cannot connect ground states");
  if (initial.levels() != config.levels) throw DimensionError("initial state tracks a different level count");

  const HermitianMatrix w = build_w(hp, hi);
  const auto dim = static_cast<Eigen::Index>(w.dimension());
  const auto m = static_cast<Eigen::Index>(config.levels);
  const FlowEvaluator evaluate(hi, w, config.schedule, config.closure, config.min_gap);
  const double threshold = evaluate.threshold();

  std::vector<double> outputs = config.output_s;
  outputs.push_back(config.end_s);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
                outputs.end());

  FlowTrajectory traj;
  auto record = [&](FlowState st) {
    measure(st);
    traj.max_norm_drift = std::max(traj.max_norm_drift, st.norm_drift);
    traj.max_orthogonality_drift = std::max(traj.max_orthogonality_drift, st.orthogonality_drift);
    traj.states.push_back(std::move(st));
  };

  auto system = [&](const Packed& x, Packed& dxds, double s) {
    ++traj.rhs_evaluations;
    const FlowState st = unpack(x, s, dim, m);
    const FlowDerivative d = evaluate(st);
    dxds.resize(x.size());
    Eigen::Map<Eigen::VectorXd>(dxds.data(), m) = d.energies;
    Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<Complex*>(dxds.data() + m), dim, m) = d.vectors;
  };

  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(config.abs_tol, config.rel_tol, ode::runge_kutta_dopri5<Packed>());
  const double start = initial.s;
  std::size_t next = 0;
  while (next < outputs.size() && outputs[next] <= start + 1e-14) {
    FlowState st = initial;
    st.s = outputs[next++];
    record(std::move(st));
  }
  stepper.initialize(pack(initial), start, std::min(1e-5, config.end_s - start));

  // Restart past a collapse at `t`: widen the skip until the tracked levels
  // are comfortably separated again, filling skipped outputs directly.
  auto reseed = [&](double t, const Eigen::MatrixXcd& previous) {
    if (traj.reseeds.size() >= config.max_reseeds) throw NumericError("flow exceeded the reseed budget");
    traj.reseeds.push_back(t);
    const double separated = 1e3 * threshold;
    double delta = 1e-6;
    SpectrumSlice slice;
    for (;;) {
      const double s_r = std::min(t + delta, config.end_s);
      slice = spectrum_at(hp, hi, config.schedule, s_r, config.levels);
      double gap = INFINITY;
      for (Eigen::Index q = 0; q + 1 < m; ++q) gap = std::min(gap, slice.energies[q + 1] - slice.energies[q]);
      if (gap >= separated || s_r >= config.end_s) break;
      if (delta >= 1e-2) throw GapCollapseError(s_r, gap);
      delta *= 2.0;
    }
    auto aligned = [&](SpectrumSlice sl) {
      const Eigen::MatrixXcd ov = previous.adjoint() * sl.vectors;
      for (Eigen::Index q = 0; q < m; ++q) {
        Eigen::Index j = 0;
        ov.col(q).cwiseAbs().maxCoeff(&j);
        const Complex o = ov(j, q);
        if (std::abs(o) > 0.0) sl.vectors.col(q) *= std::conj(o) / std::abs(o);
      }
      FlowState st;
      st.s = sl.s;
      st.energies = sl.energies;
      st.vectors = sl.vectors;
      return st;
    };
    while (next < outputs.size() && outputs[next] < slice.s - 1e-14)
      record(aligned(spectrum_at(hp, hi, config.schedule, outputs[next++], config.levels)));
    const FlowState restart = aligned(slice);
    if (next < outputs.size() && std::abs(outputs[next] - slice.s) <= 1e-14) {
      record(restart);
      ++next;
    }
    if (next < outputs.size())
      stepper.initialize(pack(restart), restart.s, std::min(1e-6, config.end_s - restart.s));
  };

  Packed buffer;
  try {
    while (next < outputs.size()) {
      const double t = stepper.current_time();
      if (traj.steps >= config.max_steps) throw NumericError("flow exceeded the step budget");
      if (stepper.current_time_step() < 1e-14) {
        if (!config.reseed_on_collapse) throw NumericError("flow step size underflow at s=" + std::to_string(t));
        reseed(t, unpack(stepper.current_state(), t, dim, m).vectors);
        continue;
      }
      if (t + stepper.current_time_step() > config.end_s)
        stepper.initialize(stepper.current_state(), t, config.end_s - t);
      double t1 = t;
      try {
        t1 = stepper.do_step(system).second;
      } catch (const GapCollapseError&) {
        if (!config.reseed_on_collapse) throw;
        reseed(t, unpack(stepper.current_state(), t, dim, m).vectors);
        continue;
      }
      ++traj.steps;

      FlowState now = unpack(stepper.current_state(), t1, dim, m);
      measure(now);
      if (now.min_gap < traj.min_gap) {
        traj.min_gap = now.min_gap;
        traj.min_gap_s = t1;
      }
      if (now.min_gap < threshold) {
        if (!config.reseed_on_collapse) throw GapCollapseError(t1, now.min_gap);
        reseed(t1, now.vectors);
        continue;
      }
      if (now.norm_drift > 1e-3 || now.orthogonality_drift > 1e-3)
        throw NormDriftError("flow norm drift exceeded 1e-3 at s=" + format_number(t1));
      traj.max_norm_drift = std::max(traj.max_norm_drift, now.norm_drift);
      traj.max_orthogonality_drift = std::max(traj.max_orthogonality_drift, now.orthogonality_drift);

      const bool at_end = t1 >= config.end_s - 1e-13;
      while (next < outputs.size() && (outputs[next] <= t1 || at_end)) {
        if (at_end && std::abs(outputs[next] - config.end_s) <= 1e-13) {
          record(unpack(stepper.current_state(), outputs[next], dim, m));
        } else {
          buffer.resize(stepper.current_state().size());
          stepper.calc_state(outputs[next], buffer);
          record(unpack(buffer, outputs[next], dim, m));
        }
        ++next;
      }
    }
  } catch (const ode::step_adjustment_error& e) {
    throw NumericError(std::string("flow step size underflow: ") + e.what());
  } catch (const ode::no_progress_error& e) {
    throw NumericError(std::string("flow step size underflow: ") + e.what());
  }
  return traj;
}

ResidualReport flow_vs_diagonalization_residual(const FlowTrajectory& trajectory, const HermitianMatrix& hp,
                                                const HermitianMatrix& hi, const Schedule& schedule,
                                                const EigenOptions& options) {
  ResidualReport rep;
  for (const auto& st : trajectory.states) {
    const SpectrumSlice exact = spectrum_at(hp, hi, schedule, st.s, st.levels(), options);
    ResidualRow row;
    row.s = st.s;
    for (Eigen::Index q = 0; q < st.energies.size(); ++q) {
      const double dev = std::abs(st.energies[q] - exact.energies[q]);
      row.max_energy_deviation = std::max(row.max_energy_deviation, dev);
      if (q == 0) row.ground_energy_deviation = dev;
      const double ov = std::abs(exact.vectors.col(q).dot(st.vectors.col(q))) / st.vectors.col(q).norm();
      row.min_overlap = std::min(row.min_overlap, ov);
    }
    rep.max_energy_deviation = std::max(rep.max_energy_deviation, row.max_energy_deviation);
    rep.ground_energy_deviation = std::max(rep.ground_energy_deviation, row.ground_energy_deviation);
    rep.min_overlap = std::min(rep.min_overlap, row.min_overlap);
    rep.rows.push_back(row);
  }
  return rep;
}

double extrapolate_to_zero(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("extrapolation needs matching, nonempty samples");
  std::vector<double> p(y.begin(), y.end());
  const std::size_t n = p.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i + k < n; ++i) {
      const double den = x[i] - x[i + k];
      if (den == 0.0) throw DomainError("extrapolation abscissae must be distinct");
      p[i] = (x[i] * p[i + 1] - x[i + k] * p[i]) / den;
    }
  return p[0];
}

GroundLimit estimate_ground_limit(const FlowTrajectory& trajectory, std::span<const double> s_points) {
  GroundLimit lim;
  std::vector<double> dist;
  for (double s : s_points) {
    lim.s.push_back(s);
    lim.e0.push_back(trajectory.at(s).energies[0]);
    dist.push_back(1.0 - s);
  }
  lim.value = extrapolate_to_zero(dist, lim.e0);
  return lim;
}

}  // namespace fockflow
