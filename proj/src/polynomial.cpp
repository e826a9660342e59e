#include "fockflow/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "fockflow/error.hpp"

namespace fockflow {

namespace {

using TermMap = std::map<Exponents, BigInt, std::greater<>>;

void add_into(TermMap& acc, const Exponents& e, const BigInt& c) {
  if (c == 0) return;
  auto [it, inserted] = acc.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) acc.erase(it);
  }
}

}  // namespace

DiophantinePolynomial::DiophantinePolynomial(std::vector<std::string> variable_names,
                                             std::vector<Term> terms)
    : names_(std::move(variable_names)) {
  if (names_.empty()) throw DomainError("polynomial needs at least one variable");
  TermMap acc;
  for (auto& t : terms) {
    if (t.exponents.size() != names_.size())
      throw DimensionError("term exponent tuple has length " + std::to_string(t.exponents.size()) +
                           ", expected " + std::to_string(names_.size()));
    add_into(acc, t.exponents, t.coefficient);
  }
  terms_.reserve(acc.size());
  for (auto& [e, c] : acc) terms_.push_back({c, e});
}

unsigned DiophantinePolynomial::degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) {
    unsigned s = 0;
    for (unsigned e : t.exponents) s += e;
    d = std::max(d, s);
  }
  return d;
}

BigInt DiophantinePolynomial::evaluate(std::span<const unsigned> point) const {
  if (point.size() != num_vars())
    throw DimensionError("point has " + std::to_string(point.size()) + " coordinates, polynomial has " +
                         std::to_string(num_vars()) + " variables");
  BigInt sum = 0;
  for (const auto& t : terms_) {
    BigInt v = t.coefficient;
    for (std::size_t i = 0; i < point.size() && v != 0; ++i) {
      if (t.exponents[i] != 0) v *= boost::multiprecision::pow(BigInt(point[i]), t.exponents[i]);
    }
    sum += v;
  }
  return sum;
}

BigInt DiophantinePolynomial::evaluate_squared(std::span<const unsigned> point) const {
  BigInt v = evaluate(point);
  return v * v;
}

std::string DiophantinePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    BigInt mag = abs(t.coefficient);
    if (first) {
      if (t.coefficient < 0) out << '-';
    } else {
      out << (t.coefficient < 0 ? " - " : " + ");
    }
    first = false;

    std::vector<std::string> factors;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (t.exponents[i] == 0) continue;
      factors.push_back(t.exponents[i] == 1 ? names_[i]
                                            : names_[i] + "^" + std::to_string(t.exponents[i]));
    }
    if (factors.empty() || mag != 1) {
      out << mag;
      if (!factors.empty()) out << '*';
    }
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k) out << '*';
      out << factors[k];
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && (s[i] == '.' || s[i] == 'e' || s[i] == 'E'))
        throw ParseError("non-integer literal", start);
      out.push_back({Tok::Number, start, std::string(s.substr(start, i - start))});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '.': throw ParseError("non-integer literal", start);
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, start, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, s.size(), ""});
  return out;
}

std::optional<unsigned> indexed_variable(const std::string& name) {
  if (name.size() < 2 || name[0] != 'x' || name[1] == '0') return std::nullopt;
  unsigned v = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    v = v * 10 + static_cast<unsigned>(name[i] - '0');
    if (v > 1000000) return std::nullopt;
  }
  return v;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::map<std::string, std::size_t> var_index, std::size_t nvars,
         const ParseOptions& opt)
      : toks_(std::move(tokens)), var_index_(std::move(var_index)), k_(nvars), opt_(opt) {}

  TermMap parse() {
    TermMap p = expr();
    if (peek().kind != Tok::End) unexpected();
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void unexpected() const {
    const Token& t = peek();
    if (t.kind == Tok::End) throw ParseError("unexpected end of input", t.offset);
    throw ParseError("unexpected '" + t.text + "'", t.offset);
  }

  static bool starts_primary(Tok k) { return k == Tok::Number || k == Tok::Ident || k == Tok::LParen; }

  TermMap constant(const BigInt& c) const {
    TermMap m;
    add_into(m, Exponents(k_, 0), c);
    return m;
  }

  static TermMap add(TermMap a, const TermMap& b, int sign) {
    for (const auto& [e, c] : b) add_into(a, e, sign > 0 ? c : BigInt(-c));
    return a;
  }

  TermMap mul(const TermMap& a, const TermMap& b) const {
    TermMap out;
    for (const auto& [ea, ca] : a)
      for (const auto& [eb, cb] : b) {
        Exponents e(k_);
        for (std::size_t i = 0; i < k_; ++i) e[i] = ea[i] + eb[i];
        add_into(out, e, ca * cb);
      }
    return out;
  }

  TermMap expr() {
    TermMap acc = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const int sign = take().kind == Tok::Plus ? 1 : -1;
      acc = add(std::move(acc), term(), sign);
    }
    return acc;
  }

  TermMap term() {
    TermMap acc = unary();
    for (;;) {
      if (peek().kind == Tok::Star) {
        take();
        acc = mul(acc, unary());
      } else if (starts_primary(peek().kind)) {
        throw ParseError("implicit multiplication is not allowed", peek().offset);
      } else {
        return acc;
      }
    }
  }

  TermMap unary() {
    if (peek().kind == Tok::Minus) {
      take();
      return add(TermMap{}, unary(), -1);
    }
    if (peek().kind == Tok::Plus) {
      take();
      return unary();
    }
    return power();
  }

  TermMap power() {
    TermMap base = primary();
    if (peek().kind != Tok::Caret) return base;
    take();
    const Token& t = peek();
    if (t.kind == Tok::Minus) throw ParseError("negative exponent", t.offset);
    if (t.kind != Tok::Number) unexpected();
    take();
    if (t.text.size() > 9 || std::stoul(t.text) > opt_.max_exponent)
      throw ParseError("exponent exceeds " + std::to_string(opt_.max_exponent), t.offset);
    unsigned n = static_cast<unsigned>(std::stoul(t.text));
    if (peek().kind == Tok::Caret) throw ParseError("chained exponent", peek().offset);
    TermMap result = constant(1);
    while (n > 0) {
      if (n & 1u) result = mul(result, base);
      n >>= 1;
      if (n) base = mul(base, base);
    }
    return result;
  }

  TermMap primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        return constant(BigInt(t.text));
      }
      case Tok::Ident: {
        take();
        Exponents e(k_, 0);
        e[var_index_.at(t.text)] = 1;
        TermMap m;
        m.emplace(std::move(e), 1);
        return m;
      }
      case Tok::LParen: {
        take();
        TermMap inner = expr();
        if (peek().kind != Tok::RParen) unexpected();
        take();
        return inner;
      }
      default:
        unexpected();
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> var_index_;
  std::size_t k_;
  const ParseOptions& opt_;
};

}  // namespace

DiophantinePolynomial parse_polynomial(std::string_view text, const ParseOptions& options) {
  auto tokens = tokenize(text);
  if (tokens.size() == 1) throw ParseError("empty input", 0);

  // Resolve the variable naming scheme before parsing.
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  bool any_indexed = false, any_letter = false;
  unsigned max_index = 0;
  for (const auto& t : tokens) {
    if (t.kind != Tok::Ident) continue;
    if (auto idx = indexed_variable(t.text)) {
      any_indexed = true;
      max_index = std::max(max_index, *idx);
      if (max_index > options.max_vars)
        throw ParseError("variable index exceeds limit of " + std::to_string(options.max_vars), t.offset);
    } else if (t.text.size() == 1) {
      any_letter = true;
      if (!index.contains(t.text)) {
        index.emplace(t.text, names.size());
        names.push_back(t.text);
        if (names.size() > options.max_vars)
          throw ParseError("more than " + std::to_string(options.max_vars) + " variables", t.offset);
      }
    } else {
      throw ParseError("invalid variable name '" + t.text + "'", t.offset);
    }
    if (any_indexed && any_letter)
      throw ParseError("cannot mix indexed (x1..xK) and single-letter variables", t.offset);
  }
  if (any_indexed) {
    names.clear();
    index.clear();
    for (unsigned i = 1; i <= max_index; ++i) {
      names.push_back("x" + std::to_string(i));
      index.emplace(names.back(), i - 1);
    }
  }
  if (names.empty()) names.push_back("x");

  const std::size_t k = names.size();
  Parser parser(std::move(tokens), std::move(index), k, options);
  TermMap terms = parser.parse();
  std::vector<Term> list;
  list.reserve(terms.size());
  for (auto& [e, c] : terms) list.push_back({c, e});
  return DiophantinePolynomial(std::move(names), std::move(list));
}

}  // namespace fockflow
