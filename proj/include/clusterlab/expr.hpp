#pragma once

// Small symbolic expressions over named cluster variables, written the way
// identities are displayed: "(z1'z3 + z8z10)(z3'z7 + z4'z6) + S1". Products
// are juxtaposed or joined by '*'. A symbol is letters, digits, an optional
// "{k}" superscript index and trailing primes, e.g. z4'' or z1{3}.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clusterlab/laurent.hpp"

namespace clusterlab {

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnboundSymbol : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Expr {
  enum class Kind { Sum, Product, Power, Symbol, Integer };
  Kind kind = Kind::Integer;
  std::string symbol;
  Coefficient value = 0;  // Integer literal, or the exponent of a Power
  std::vector<int> signs;  // per child of a Sum: +1 or -1
  std::vector<std::shared_ptr<const Expr>> children;
};

using Macros = std::map<std::string, Expr>;
using SymbolEnv = std::map<std::string, LaurentPoly>;

/// Symbols named in `macros` are replaced by their expressions.
Expr parse_expr(std::string_view text, const Macros& macros = {});

LaurentPoly evaluate(const Expr& e, const SymbolEnv& env);

std::set<std::string> symbols_of(const Expr& e);

/// Expansion with every symbol an independent indeterminate, numbered in the
/// order of `order`.
LaurentPoly expand_formally(const Expr& e, const std::vector<std::string>& order);

std::string to_string(const Expr& e);

}  // namespace clusterlab
