#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "clusterlab/laurent.hpp"
#include "support.hpp"

using namespace clusterlab;
using clusterlab::testing::parse_poly;

namespace {
LaurentPoly P(const std::string& s) { return parse_poly(2, s); }
}  // namespace

TEST_CASE("add") {
  CHECK(P("x1") + P("x1") == P("2*x1"));
  CHECK(P("x1 - 3*x2^-1") + LaurentPoly(2) == P("x1 - 3*x2^-1"));
  CHECK(P("x1 - x2") + P("x2") == P("x1"));
  CHECK((P("x1") - P("x1")).is_zero());
  CHECK_THROWS_AS(P("x1") + LaurentPoly(3), ArityMismatch);
}

TEST_CASE("mul") {
  CHECK(P("x1") * P("x1^-1") == LaurentPoly::constant(2, 1));
  CHECK(P("x2^2 + 1") * P("x1^-1") == P("x2^2*x1^-1 + x1^-1"));
  CHECK(P("x1 + x2") * P("x1 - x2") == P("x1^2 - x2^2"));
  CHECK((P("x1 + x2") * LaurentPoly(2)).is_zero());
  CHECK_THROWS_AS(mul(P("x1"), LaurentPoly(1)), ArityMismatch);
}

TEST_CASE("try_div_exact") {
  CHECK(try_div_exact(P("x1^2 - x2^2"), P("x1 - x2")) == P("x1 + x2"));
  CHECK(try_div_exact(P("x2^2 + 1"), P("x1")) == P("x2^2*x1^-1 + x1^-1"));
  CHECK_FALSE(try_div_exact(P("x1 + 1"), P("x2 + 1")).has_value());
  CHECK_THROWS_AS(try_div_exact(P("x1"), LaurentPoly(2)), std::domain_error);

  SUBCASE("coefficients must divide") {
    CHECK_FALSE(try_div_exact(P("x1 + 1"), P("2")).has_value());
    CHECK_FALSE(try_div_exact(P("x1^2 + 1"), P("2*x1 + 2")).has_value());
    CHECK(try_div_exact(P("2*x1 + 2"), P("x1 + 1")) == P("2"));
  }
  SUBCASE("divisor with monomial content") {
    // (x1 x2^-1 + x2) = x2^-1 (x1 + x2^2)
    const auto b = P("x1*x2^-1 + x2");
    const auto a = b * P("x1^3 - x1^-2*x2 + 7");
    CHECK(try_div_exact(a, b) == P("x1^3 - x1^-2*x2 + 7"));
  }
  SUBCASE("zero numerator") {
    CHECK(try_div_exact(LaurentPoly(2), P("x1 + 1")) == LaurentPoly(2));
  }
}

TEST_CASE("reduced_form") {
  auto rf = reduced_form(P("x2^2*x1^-1 + x1^-1"));
  CHECK(rf.numerator == P("x2^2 + 1"));
  CHECK(rf.denominator == ExponentVector{1, 0});

  rf = reduced_form(P("x1*x2"));
  CHECK(rf.numerator == P("x1*x2"));
  CHECK(rf.denominator == ExponentVector{0, 0});

  rf = reduced_form(P("x1^-2*x2 + x1^-1"));
  CHECK(rf.numerator == P("x2 + x1"));
  CHECK(rf.denominator == ExponentVector{2, 0});

  // positive minimum exponents stay in the numerator
  rf = reduced_form(P("x1^2*x2 + x1^3"));
  CHECK(rf.numerator == P("x1^2*x2 + x1^3"));
  CHECK(rf.denominator == ExponentVector{0, 0});

  CHECK_THROWS_AS(reduced_form(LaurentPoly(2)), std::domain_error);
}

TEST_CASE("has_nonneg_numerator") {
  CHECK(has_nonneg_numerator(P("x2^2*x1^-1 + x1^-1")));
  CHECK_FALSE(has_nonneg_numerator(P("1 - x2*x1^-1")));
  CHECK(has_nonneg_numerator(P("1")));
  CHECK_THROWS(has_nonneg_numerator(LaurentPoly(2)));
}

TEST_CASE("partial_derivative") {
  CHECK(partial_derivative(P("x1^2"), 0) == P("2*x1"));
  CHECK(partial_derivative(P("x1^-1"), 0) == P("-x1^-2"));
  CHECK(partial_derivative(P("x2^2 + 1"), 0).is_zero());
  CHECK_THROWS_AS(partial_derivative(P("x1"), 2), std::out_of_range);
}

TEST_CASE("substitute") {
  const LaurentPoly x1p = P("x2^2*x1^-1 + x1^-1");
  // x1 -> x1', x2 -> x2 applied to x1 x1' = x2^2 + 1 gives back x1
  const std::vector<LaurentPoly> images{x1p, P("x2")};
  CHECK(substitute(P("x1^-1*x2^2 + x1^-1"), images) == P("x1"));
  // 1 / (x1 + 1) is not a Laurent polynomial
  const std::vector<LaurentPoly> shift{P("x1 + 1"), P("x2")};
  CHECK_FALSE(substitute(P("x1^-1"), shift).has_value());
  CHECK(substitute(P("x1^2 + x2"), shift) == P("x1^2 + 2*x1 + 1 + x2"));
}

TEST_CASE("ordering and printing are deterministic") {
  CHECK(P("x2") < P("x1"));  // (0,1) < (1,0) lexicographically
  CHECK(to_string(P("x2^2*x1^-1 + x1^-1")) == "x1^-1*x2^2 + x1^-1");
  CHECK(to_string(P("-x1 + 3")) == "-x1 + 3");
  CHECK(to_string(LaurentPoly(2)) == "0");
}

TEST_CASE("big coefficients do not overflow") {
  LaurentPoly p = P("x1 + 1");
  const LaurentPoly big = pow(p, 80);
  const auto& lowest = big.terms().front();
  CHECK(lowest.coeff == 1);
  // C(80, 40) exceeds 64 bits
  CHECK(big.terms()[40].coeff == Coefficient("107507208733336176461620"));
  CHECK(try_div_exact(big, pow(p, 79)) == p);
}

TEST_CASE("properties on random inputs") {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = testing::random_poly(rng, 3);
    const auto b = testing::random_poly(rng, 3);
    const auto c = testing::random_poly(rng, 3);
    const auto m = testing::random_monomial(rng, 3);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(try_div_exact(a * m, m) == a);
    if (!b.is_zero()) CHECK(try_div_exact(a * b, b) == a);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(partial_derivative(a * b, i) ==
            partial_derivative(a, i) * b + a * partial_derivative(b, i));
    }
    if (!a.is_zero()) {
      const auto rf = reduced_form(a);
      ExponentVector inv = rf.denominator;
      for (int& e : inv) e = -e;
      CHECK(rf.numerator * LaurentPoly::monomial(inv) == a);
      for (const auto& t : rf.numerator.terms()) {
        for (int e : t.exponents) CHECK(e >= 0);
      }
    }
  }
}
