#include <doctest.h>

#include <cmath>
#include <vector>

#include "fockflow/decision.hpp"
#include "fockflow/dynamics.hpp"
#include "fockflow/error.hpp"

using namespace fockflow;

namespace {

struct Problem {
  std::vector<Complex> alphas;
  TruncatedBasis basis;
  HermitianMatrix hp, hi;
  StateVector start;
};

Problem problem(const char* poly, std::vector<Complex> alphas, unsigned cutoff) {
  const auto p = parse_polynomial(poly);
  auto b = enumerate_basis(p.num_vars(), cutoff);
  auto hp = build_hp(p, b);
  auto hi = build_hi(alphas, b);
  auto start = coherent_coefficients(alphas, b).coefficients;
  return {std::move(alphas), std::move(b), std::move(hp), std::move(hi), std::move(start)};
}

}  // namespace

TEST_CASE("stationary state under a frozen operator") {
  const auto pr = problem("x - 3", {0.8}, 20);
  EvolutionConfig ec;
  ec.total_time = 5.0;
  // H_P := H_I makes W vanish, so the operator is frozen at its s=0 value.
  const auto r = evolve(ec, pr.hi, pr.hi, pr.start);
  const double overlap = std::abs(pr.start.dot(r.final_state));
  CHECK(overlap >= 1.0 - 1e-10);
  CHECK(r.norm_drift <= 1e-8);
  CHECK(r.slices == 1000);
}

TEST_CASE("short sweeps leave the state almost untouched") {
  const auto pr = problem("x - 3", {1.0}, 8);
  const auto end = spectrum_at(pr.hp, pr.hi, Schedule{}, 0.999, 4);
  EvolutionConfig ec;
  ec.total_time = 1e-7;
  ec.num_slices = 10;
  const auto r = evolve(ec, pr.hp, pr.hi, pr.start);
  const double expected = std::norm(end.vectors.col(0).dot(pr.start));
  CHECK(ground_overlap(r.final_state, end) == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("Krylov slices agree with exact exponentials") {
  const auto pr = problem("x + y - 3", {{0.9, 0.1}, {0.81, 0.09}}, 4);
  EvolutionConfig dense;
  dense.total_time = 3.0;
  dense.num_slices = 300;
  EvolutionConfig krylov = dense;
  krylov.dense_limit = 4;
  const auto a = evolve(dense, pr.hp, pr.hi, pr.start);
  const auto b = evolve(krylov, pr.hp, pr.hi, pr.start);
  CHECK((a.final_state - b.final_state).norm() < 1e-9);
  CHECK(b.norm_drift <= 1e-8);
}

TEST_CASE("midpoint slicing converges at second order") {
  const auto pr = problem("x - 3", {1.0}, 6);
  EvolutionConfig ec;
  ec.total_time = 4.0;
  auto at = [&](std::size_t n) {
    ec.num_slices = n;
    return evolve(ec, pr.hp, pr.hi, pr.start).final_state;
  };
  const auto ref = at(6400);
  const double e1 = (at(100) - ref).norm(), e2 = (at(200) - ref).norm();
  CHECK(e1 / e2 >= 3.5);
}

TEST_CASE("slice convergence is reported") {
  const auto pr = problem("x - 3", {1.0}, 8);
  const auto end = spectrum_at(pr.hp, pr.hi, Schedule{}, 0.999, 4);
  EvolutionConfig ec;
  ec.total_time = 10.0;
  ec.check_convergence = true;
  const auto r = evolve(ec, pr.hp, pr.hi, pr.start, &end);
  CHECK(r.slice_convergence <= 1e-6);
  CHECK_THROWS_AS(evolve(ec, pr.hp, pr.hi, pr.start), DomainError);
}

TEST_CASE("adiabatic trend and dominant outcome") {
  const auto pr = problem("x - 3", {1.0}, 8);
  const auto end = spectrum_at(pr.hp, pr.hi, Schedule{}, 0.999, 4);
  const auto sweep = adiabatic_sweep({5.0, 20.0, 60.0}, EvolutionConfig{}, pr.hp, pr.hi, pr.start, end);
  REQUIRE(sweep.size() == 3);
  for (std::size_t j = 1; j < sweep.size(); ++j) CHECK(sweep[j].probability >= sweep[j - 1].probability - 0.02);
  CHECK(sweep.back().probability > 0.5);
  CHECK(pr.basis.tuple_of(sweep.back().dominant_index) == Occupation{3});
}

TEST_CASE("ground overlap edge cases") {
  const auto pr = problem("x - 3", {1.0}, 8);
  const auto end = spectrum_at(pr.hp, pr.hi, Schedule{}, 0.999, 4);
  CHECK(ground_overlap(end.vectors.col(0), end) == doctest::Approx(1.0));
  CHECK(ground_overlap(end.vectors.col(2), end) < 1e-20);
  // A degenerate pair is counted together.
  SpectrumSlice pair = end;
  pair.energies[1] = pair.energies[0];
  CHECK(ground_overlap(end.vectors.col(1), pair) == doctest::Approx(1.0));
}

TEST_CASE("argument validation") {
  const auto pr = problem("x - 3", {1.0}, 8);
  EvolutionConfig ec;
  ec.total_time = 0.0;
  CHECK_THROWS_AS(evolve(ec, pr.hp, pr.hi, pr.start), DomainError);
  ec.total_time = 1.0;
  CHECK_THROWS_AS(evolve(ec, pr.hp, pr.hi, 2.0 * pr.start), DomainError);
  const auto end = spectrum_at(pr.hp, pr.hi, Schedule{}, 0.999, 2);
  CHECK_THROWS_AS(adiabatic_sweep({}, ec, pr.hp, pr.hi, pr.start, end), DomainError);
  CHECK_THROWS_AS(adiabatic_sweep({5.0, 1.0}, ec, pr.hp, pr.hi, pr.start, end), DomainError);
}
