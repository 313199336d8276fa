#pragma once

// Test helpers: a small reader for polynomials written like "x1^2*x2^-1 - 3"
// and random generators for property tests.

#include <cctype>
#include <random>
#include <stdexcept>
#include <string>

#include "clusterlab/laurent.hpp"

namespace clusterlab::testing {

inline LaurentPoly parse_poly(std::size_t arity, const std::string& text,
                              const std::string& stem = "x") {
  std::vector<LaurentPoly::Term> terms;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_int = [&] {
    std::size_t start = i;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    return std::stoi(text.substr(start, i - start));
  };
  skip();
  int sign = 1;
  if (i < text.size() && text[i] == '-') {
    sign = -1;
    ++i;
  }
  while (true) {
    skip();
    LaurentPoly::Term term{ExponentVector(arity, 0), Coefficient(sign)};
    bool need_factor = true;
    while (need_factor) {
      skip();
      if (std::isdigit(static_cast<unsigned char>(text[i]))) {
        std::size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        term.coeff *= Coefficient(text.substr(start, i - start));
      } else if (text.compare(i, stem.size(), stem) == 0) {
        i += stem.size();
        const int index = read_int();
        int e = 1;
        if (i < text.size() && text[i] == '^') {
          ++i;
          e = read_int();
        }
        term.exponents.at(static_cast<std::size_t>(index - 1)) += e;
      } else {
        throw std::invalid_argument("cannot parse polynomial: " + text);
      }
      skip();
      need_factor = i < text.size() && text[i] == '*';
      if (need_factor) ++i;
    }
    terms.push_back(std::move(term));
    skip();
    if (i >= text.size()) break;
    if (text[i] == '+') {
      sign = 1;
    } else if (text[i] == '-') {
      sign = -1;
    } else {
      throw std::invalid_argument("cannot parse polynomial: " + text);
    }
    ++i;
  }
  return LaurentPoly::from_terms(arity, std::move(terms));
}

inline LaurentPoly random_poly(std::mt19937& rng, std::size_t arity,
                               int max_terms = 4, int max_exp = 2,
                               bool allow_negative_exponents = true) {
  std::uniform_int_distribution<int> count(1, max_terms);
  std::uniform_int_distribution<int> exp(allow_negative_exponents ? -max_exp : 0,
                                         max_exp);
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::vector<LaurentPoly::Term> terms;
  const int n = count(rng);
  for (int t = 0; t < n; ++t) {
    ExponentVector e(arity);
    for (auto& v : e) v = exp(rng);
    terms.push_back({std::move(e), Coefficient(coeff(rng))});
  }
  return LaurentPoly::from_terms(arity, std::move(terms));
}

inline LaurentPoly random_monomial(std::mt19937& rng, std::size_t arity) {
  std::uniform_int_distribution<int> exp(-3, 3);
  std::uniform_int_distribution<int> coeff(1, 4);
  ExponentVector e(arity);
  for (auto& v : e) v = exp(rng);
  return LaurentPoly::monomial(std::move(e), coeff(rng) * (exp(rng) < 0 ? -1 : 1));
}

}  // namespace clusterlab::testing
