#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fockflow {

using BigInt = boost::multiprecision::cpp_int;
using Exponents = std::vector<unsigned>;

struct Term {
  BigInt coefficient;
  Exponents exponents;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Multivariate polynomial with integer coefficients in expanded form.
///
/// Terms are kept in canonical order: exponent tuples in descending
/// lexicographic order, coefficients nonzero, tuples pairwise distinct.
/// The zero polynomial has no terms.
class DiophantinePolynomial {
 public:
  /// Builds the canonical form from arbitrary terms (like terms are merged,
  /// zero coefficients dropped).
  DiophantinePolynomial(std::vector<std::string> variable_names, std::vector<Term> terms);

  std::size_t num_vars() const noexcept { return names_.size(); }
  const std::vector<std::string>& variable_names() const noexcept { return names_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  unsigned degree() const;

  BigInt evaluate(std::span<const unsigned> point) const;
  BigInt evaluate_squared(std::span<const unsigned> point) const;

  /// Canonical text: sorted terms, explicit `*`, `^` for powers.
  std::string to_string() const;

  friend bool operator==(const DiophantinePolynomial&, const DiophantinePolynomial&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Term> terms_;
};

struct ParseOptions {
  std::size_t max_vars = 8;
  unsigned max_exponent = 256;
};

/// Parses `+ - * ^ ( )`, integer literals and variables. Variables are either
/// all of the indexed form x1..xK (K is the largest index) or all distinct
/// single letters (ordered by first appearance). Implicit multiplication is
/// rejected. Throws ParseError with the byte offset of the offending token.
DiophantinePolynomial parse_polynomial(std::string_view text, const ParseOptions& options = {});

}  // namespace fockflow
