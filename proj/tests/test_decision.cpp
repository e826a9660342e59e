#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <vector>

#include "fockflow/decision.hpp"
#include "fockflow/error.hpp"

using namespace fockflow;

namespace {

// Oracle: nested loops in plain integers.
std::vector<Occupation> roots_of_circle(unsigned bound) {
  std::vector<Occupation> out;
  for (unsigned x = 0; x <= bound; ++x)
    for (unsigned y = 0; y <= bound; ++y)
      if (std::int64_t(x) * x + std::int64_t(y) * y == 25) out.push_back({x, y});
  return out;
}

DecisionConfig quick() {
  DecisionConfig c;
  c.flow.levels = 4;
  return c;
}

}  // namespace

TEST_CASE("brute force agrees with nested loops") {
  const auto p = parse_polynomial("x^2 + y^2 - 25");
  CHECK(brute_force_oracle(p, 6) == roots_of_circle(6));
  CHECK(brute_force_oracle(p, 4) == roots_of_circle(4));
  CHECK(brute_force_oracle(parse_polynomial("2*x - 1"), 20).empty());
  CHECK_THROWS_AS(brute_force_oracle(p, 100, 1000), BudgetError);
}

TEST_CASE("witness extraction verifies exactly") {
  const auto p = parse_polynomial("x + y - 3");
  const auto b = enumerate_basis(2, 4);
  StateVector v = StateVector::Zero(Eigen::Index(b.dimension()));
  v[Eigen::Index(b.index_of(std::vector<unsigned>{2, 2}))] = 0.9;  // heaviest, not a root
  v[Eigen::Index(b.index_of(std::vector<unsigned>{1, 2}))] = 0.4;
  v.normalize();
  CHECK(extract_witness(v, p, b, 4) == Occupation{1, 2});
  CHECK(!extract_witness(v, p, b, 1).has_value());
}

TEST_CASE("boundary leakage counts the outer shell") {
  const auto b = enumerate_basis(2, 4);
  StateVector v = StateVector::Zero(Eigen::Index(b.dimension()));
  v[Eigen::Index(b.index_of(std::vector<unsigned>{1, 1}))] = std::sqrt(0.75);
  v[Eigen::Index(b.index_of(std::vector<unsigned>{0, 3}))] = std::sqrt(0.25);
  CHECK(boundary_leakage(v, b) == doctest::Approx(0.25));
}

TEST_CASE("default displacements are distinct per mode") {
  const auto a = default_alphas(3);
  CHECK(a[0] == Complex(0.9, 0.1));
  std::set<double> mags;
  for (auto z : a) mags.insert(std::abs(z));
  CHECK(mags.size() == 3);
  const auto e = default_epsilons(0.01, 2);
  CHECK(std::abs(e[0] - Complex(0.01, 0.0)) < 1e-15);
  CHECK(std::abs(e[1] - Complex(0.0, 0.013)) < 1e-15);
}

TEST_CASE("single-variable root is found") {
  const auto r = decide(parse_polynomial("x - 3"), quick());
  CHECK(r.verdict == Verdict::solution_found);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == Occupation{3});
  CHECK(r.e0_limit_estimate <= 1e-3);
  CHECK(r.dynamics_agrees == true);
}

TEST_CASE("odd target has no root in the window") {
  const auto r = decide(parse_polynomial("2*x - 1"), quick());
  CHECK(r.verdict == Verdict::no_solution_in_window);
  CHECK(!r.witness.has_value());
  CHECK(std::abs(r.e0_limit_estimate - 1.0) <= 1e-3);
  CHECK(r.boundary_leakage <= 1e-6);
}

TEST_CASE("a window too small never claims a verdict") {
  DecisionConfig c = quick();
  c.cutoff = 2;
  const auto r = decide(parse_polynomial("x - 3"), c);
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(!r.reasons.empty());
}

TEST_CASE("commuting problem is inconclusive") {
  const auto r = decide(parse_polynomial("5"), quick());
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(!r.reasons.empty());
}

TEST_CASE("displacement count must match the variables") {
  DecisionConfig c = quick();
  c.alphas = {1.0, 1.0};
  CHECK_THROWS_AS(decide(parse_polynomial("x - 3"), c), DimensionError);
}

TEST_CASE("small two-variable instance") {
  DecisionConfig c = quick();
  c.cutoff = 4;
  const auto p = parse_polynomial("x + y - 2");
  const auto r = decide(p, c);
  CHECK(r.verdict == Verdict::solution_found);
  REQUIRE(r.witness.has_value());
  const auto roots = brute_force_oracle(p, 4);
  CHECK(std::find(roots.begin(), roots.end(), *r.witness) != roots.end());
  CHECK(r.perturbation_used);
  CHECK(r.passes.size() == 2);
}

TEST_CASE("report layout") {
  const auto r = decide(parse_polynomial("x - 3"), quick());
  std::ostringstream out;
  write_report(out, r);
  const std::string text = out.str();
  for (const char* key : {"[decision]", "verdict = solution_found", "witness = (3)", "[truncation]", "[diagnostics]",
                          "[pass.0]"})
    CHECK(text.find(key) != std::string::npos);
  CHECK(format_occupation({1, 2}) == "(1,2)");
  CHECK(format_complex({0.5, -0.25}) == "0.5-0.25i");
  CHECK(format_complex({0.0, 2.0}) == "2i");
  CHECK(to_string(Verdict::no_solution_in_window) == "no_solution_in_window");
}
