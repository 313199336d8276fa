#pragma once

// Exact integer-coefficient Laurent polynomials in a fixed number of
// variables. Every cluster variable and every identity check is expressed
// with this type.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace clusterlab {

using Coefficient = mpz_class;

/// Exponents of one Laurent monomial; entries may be negative.
using ExponentVector = std::vector<int>;

class ArityMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sparse Laurent polynomial with terms kept sorted lexicographically by
/// exponent vector and no zero coefficients, so equality is structural.
class LaurentPoly {
 public:
  struct Term {
    ExponentVector exponents;
    Coefficient coeff;

    bool operator==(const Term&) const = default;
  };

  explicit LaurentPoly(std::size_t arity = 0) : arity_(arity) {}

  static LaurentPoly constant(std::size_t arity, const Coefficient& c);
  static LaurentPoly variable(std::size_t arity, std::size_t index);
  static LaurentPoly monomial(ExponentVector exponents,
                              const Coefficient& c = 1);
  /// Builds from arbitrary terms; merges duplicates and drops zeros.
  static LaurentPoly from_terms(std::size_t arity, std::vector<Term> terms);

  std::size_t arity() const { return arity_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_constant() const;
  /// Largest term under the lexicographic exponent order.
  const Term& leading_term() const;

  LaurentPoly operator-() const;
  LaurentPoly& operator+=(const LaurentPoly& other);
  LaurentPoly& operator-=(const LaurentPoly& other);
  LaurentPoly& operator*=(const LaurentPoly& other);

  bool operator==(const LaurentPoly& other) const = default;
  /// Deterministic total order: arity, then term lists compared
  /// lexicographically (exponents first, then coefficient).
  std::strong_ordering operator<=>(const LaurentPoly& other) const;

  std::size_t hash() const;

 private:
  std::size_t arity_;
  std::vector<Term> terms_;
};

LaurentPoly add(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly sub(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly mul(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly pow(const LaurentPoly& a, unsigned exponent);

inline LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
  return a += b;
}
inline LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
  return a -= b;
}
inline LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  return mul(a, b);
}

/// Exact quotient a / b, or nullopt when b does not divide a in the Laurent
/// ring over the integers. Throws std::domain_error if b is zero.
std::optional<LaurentPoly> try_div_exact(const LaurentPoly& a,
                                         const LaurentPoly& b);

struct ReducedForm {
  LaurentPoly numerator;        // every exponent >= 0
  ExponentVector denominator;   // entries >= 0
};

/// Splits a into numerator / x^denominator with the smallest denominator.
ReducedForm reduced_form(const LaurentPoly& a);

/// True iff every coefficient of the reduced numerator is positive.
bool has_nonneg_numerator(const LaurentPoly& a);

LaurentPoly partial_derivative(const LaurentPoly& a, std::size_t index);

/// Substitutes variable i by images[i]. Negative powers are realised by exact
/// division, so the result is nullopt when it is not a Laurent polynomial.
std::optional<LaurentPoly> substitute(const LaurentPoly& a,
                                      std::span<const LaurentPoly> images);

/// Display names for variables; kept outside the polynomial itself.
struct VariableNames {
  std::vector<std::string> names;

  static VariableNames indexed(std::size_t arity, const std::string& stem = "x",
                               int first = 1);
  const std::string& operator[](std::size_t i) const { return names.at(i); }
};

std::string to_string(const LaurentPoly& a, const VariableNames& names);
std::string to_string(const LaurentPoly& a);

}  // namespace clusterlab

template <>
struct std::hash<clusterlab::LaurentPoly> {
  std::size_t operator()(const clusterlab::LaurentPoly& p) const noexcept {
    return p.hash();
  }
};
