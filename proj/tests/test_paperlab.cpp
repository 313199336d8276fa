#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "clusterlab/paperlab.hpp"
#include "support.hpp"

using namespace clusterlab;
using clusterlab::testing::parse_poly;

namespace {

LaurentPoly var(std::size_t n, std::size_t i) { return LaurentPoly::variable(n, i); }

LaurentPoly over(const LaurentPoly& num, const LaurentPoly& den) {
  auto q = try_div_exact(num, den);
  REQUIRE(q.has_value());
  return *q;
}

bool failed(const IdentityReport& r, const std::string& prefix) {
  return std::any_of(r.checks.begin(), r.checks.end(), [&](const Check& c) {
    return !c.passed && c.name.rfind(prefix, 0) == 0;
  });
}

bool all_pass(const IdentityReport& r, const std::string& prefix) {
  bool any = false;
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    any = true;
    if (!c.passed) return false;
  }
  return any;
}

// Peripheral chords on one boundary line cross when exactly one endpoint of
// a translate lies strictly inside the other.
int peripheral_crossing_oracle(const ArcLift& a, const ArcLift& b, const MarkedAnnulus& an) {
  if (a.e1.boundary != b.e1.boundary) return 0;
  const long n = an.period(a.e1.boundary);
  const long a1 = std::min(a.e1.pos, a.e2.pos), a2 = std::max(a.e1.pos, a.e2.pos);
  int total = 0;
  for (long k = -20; k <= 20; ++k) {
    const long b1 = std::min(b.e1.pos, b.e2.pos) + k * n;
    const long b2 = std::max(b.e1.pos, b.e2.pos) + k * n;
    if (b1 == a1 || b1 == a2 || b2 == a1 || b2 == a2) continue;
    total += (a1 < b1 && b1 < a2) != (a1 < b2 && b2 < a2);
  }
  return total;
}

}  // namespace

TEST_CASE("expressions parse juxtaposed products, primes and indices") {
  const std::vector<std::string> order = {"z1", "z1'", "z1''", "z2", "z4{3}"};
  CHECK(expand_formally(parse_expr("z1z1'z1''"), order) ==
        parse_poly(5, "x1*x2*x3"));
  CHECK(expand_formally(parse_expr("(z1')^2 + 3 z2 z4{3}"), order) ==
        parse_poly(5, "x2^2 + 3*x4*x5"));
  CHECK(expand_formally(parse_expr("(z1 + z2)(z1 - z2)"), order) ==
        parse_poly(5, "x1^2 - x4^2"));
  CHECK(expand_formally(parse_expr("-z1 + 2*z2"), order) == parse_poly(5, "-x1 + 2*x4"));
  CHECK(symbols_of(parse_expr("z1''S6 + z4{3}")) ==
        std::set<std::string>{"z1''", "S6", "z4{3}"});
  CHECK_THROWS_AS(parse_expr("z1 +"), ParseError);
  CHECK_THROWS_AS(parse_expr("(z1"), ParseError);
  CHECK_THROWS_AS(parse_expr("z1^"), ParseError);
  CHECK_THROWS_AS(parse_expr("z1{3"), ParseError);
  CHECK_THROWS_AS(evaluate(parse_expr("w"), {{"z", var(1, 0)}}), UnboundSymbol);
}

TEST_CASE("macros expand in place and printing round-trips") {
  Macros m;
  m["S1"] = parse_expr("z2z3");
  m["S2"] = parse_expr("z1 + S1", m);
  const std::vector<std::string> order = {"z1", "z2", "z3"};
  CHECK(expand_formally(parse_expr("z1 S2", m), order) == parse_poly(3, "x1^2 + x1*x2*x3"));
  std::mt19937 rng(11);
  const std::vector<std::string> texts = {"(z1'z3 + z8z10)(z3'z7 + z4'z6) + S1",
                                          "z1'z3'(z1'')^2z2 + z4''S6", "2(z1 - 3z2)^3"};
  for (const auto& t : texts) {
    const Expr e = parse_expr(t);
    const auto syms = symbols_of(e);
    const std::vector<std::string> o(syms.begin(), syms.end());
    CHECK(expand_formally(parse_expr(to_string(e)), o) == expand_formally(e, o));
  }
}

TEST_CASE("product lemma on the Kronecker exchange") {
  const IdentityReport r = verify_lemma31(kronecker_lemma_instance());
  CHECK(r.passed());
  CHECK(r.find("x1 or x2 outside the cluster")->detail == "x1 not in, x1' in");
}

TEST_CASE("product lemma guards") {
  LemmaInstance in;
  in.values = {{"x1", var(2, 0)}, {"x2", var(2, 1)}};
  in.x1 = "x1";
  in.x2 = "x2";
  in.sigmas = {"x1x2"};
  in.cluster = {var(2, 0), var(2, 1)};
  CHECK_THROWS_AS(verify_lemma31(in), SideConditionViolated);

  in.sigmas = {"x1x2 - 1"};
  CHECK_THROWS_AS(verify_lemma31(in), SideConditionViolated);

  in.sigmas = {"x1x2 + 1"};
  CHECK_THROWS_AS(verify_lemma31(in), HypothesisNotSatisfied);

  in.sigmas = {"x1", "x2", "x1"};
  CHECK_THROWS_AS(verify_lemma31(in), std::invalid_argument);

  in.sigmas = {"x2^2 + 1"};
  in.x2 = "y";
  CHECK_THROWS_AS(verify_lemma31(in), UnboundSymbol);
}

TEST_CASE("product lemma on instances read off the chains") {
  const auto instances = chain_lemma_instances();
  REQUIRE(instances.size() == 4);
  for (const auto& in : instances) {
    const IdentityReport r = verify_lemma31(in);
    CHECK(r.passed());
    CHECK(r.find("x1 or x2 outside the cluster")->detail.find("not in") != std::string::npos);
  }
}

TEST_CASE("property: product lemma on random exchange relations") {
  // x_k x_k' = P + Q with P, Q the two monomials of the exchange numerator;
  // neither the old nor the new cluster contains both x_k and x_k'.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int q = 1 + trial % 2;
    const int p = q + (trial / 2) % 3;
    Seed s = initial_seed(tilde_A_canonical(p, q));
    const std::size_t n = s.rank();
    std::uniform_int_distribution<std::size_t> dir(0, n - 1);
    for (int step = 0; step < 4; ++step) s = mutate_seed(s, dir(rng));
    const std::size_t k = dir(rng);
    const Seed t = mutate_seed(s, k);

    LemmaInstance in;
    std::string out_product, in_product;
    for (std::size_t i = 0; i < n; ++i) in.values["c" + std::to_string(i + 1)] = s.cluster[i];
    in.values["new"] = t.cluster[k];
    for (std::size_t j = 0; j < n; ++j) {
      for (int a = 0; a < s.quiver(k, j); ++a) out_product += "c" + std::to_string(j + 1) + " ";
      for (int a = 0; a < s.quiver(j, k); ++a) in_product += "c" + std::to_string(j + 1) + " ";
    }
    auto term = [](const std::string& t) { return t.empty() ? std::string("1") : t; };
    in.x1 = "c" + std::to_string(k + 1);
    in.x2 = "new";
    in.sigmas = {term(out_product) + " + " + term(in_product)};
    for (const auto& cluster : {s.cluster, t.cluster}) {
      in.cluster = cluster;
      CHECK(verify_lemma31(in).passed());
    }
  }
}

TEST_CASE("case 2 chain as displayed fails from its first residual") {
  const IdentityReport r = verify_case2_formal();
  CHECK_FALSE(r.passed());
  CHECK(r.find("exchanges divide exactly")->passed);
  CHECK(r.checks[1].passed);  // the step before any residual appears
  for (std::size_t i = 2; i < r.checks.size(); ++i) CHECK_FALSE(r.checks[i].passed);

  // Oracle: line 3 misses exactly z2'z4z8(z5' - z5).
  const std::size_t n = 10;
  auto z = [&](int i) { return var(n, static_cast<std::size_t>(i - 1)); };
  const LaurentPoly z1p = over(z(2) * z(5) + z(4) * z(8), z(1));
  const LaurentPoly z2p = over(z1p * z(3) + z(8) * z(10), z(2));
  const LaurentPoly z3p = over(z2p * z(9) + z(4) * z(8), z(3));
  const LaurentPoly z4p = over(z1p * z3p + z2p * z(5), z(4));
  const LaurentPoly z5p = over(z3p * z(7) + z4p * z(6), z(5));
  const SymbolEnv env = realize(case2_chain().exchanges, case2_chain().residuals,
                                free_values(case2_chain()));
  CHECK(env.at("z5'") == z5p);
  const LaurentPoly lhs = z(1) * z1p * z2p * z5p;
  const LaurentPoly line3 = evaluate(parse_expr("(z2z2')(z5z5') + S1"), env);
  CHECK(lhs - line3 == z2p * z(4) * z(8) * (z5p - z(5)));
}

TEST_CASE("case 2 chain with primed residual factors") {
  CHECK(verify_case2_formal(ResidualText::Corrected).passed());
  CHECK(verify_case2_formal(ResidualText::Corrected, {"z8", "z10"}).passed());
  CHECK_FALSE(verify_case2_formal(ResidualText::Displayed, {"z8", "z10"}).passed());
  CHECK_THROWS_AS(verify_case2_formal(ResidualText::Corrected, {"z11"}), std::invalid_argument);
}

TEST_CASE("case 3 chains") {
  for (int n = 2; n <= 4; ++n) {
    const IdentityReport r = verify_case3(n);
    CHECK(r.passed());
    CHECK(r.checks.size() == case3_chain(n).lines.size());
  }
  CHECK_THROWS_AS(case3_chain(5), std::invalid_argument);

  // Oracle: the n = 3 chain ends at z1 z1' z3' z1'' = z1'z3'z2z4' + S6.
  const std::size_t n = 8;
  auto z = [&](int i) { return var(n, static_cast<std::size_t>(i - 1)); };
  const LaurentPoly z1p = over(z(2) * z(3) + z(4) * z(6), z(1));
  const LaurentPoly z2p = over(z1p * z(5) + z(3) * z(6), z(2));
  const LaurentPoly z3p = over(z1p * z1p + z2p * z(4), z(3));
  const LaurentPoly z4p = over(z1p * z(8) + z3p * z(7), z(4));
  const LaurentPoly z1pp = over(z2p * z(7) + z3p * z4p, z1p);
  const LaurentPoly s6 = z1p * z(2) * z2p * z(7) + z1pp * z(2) * z2p * z(4) +
                         z1pp * z3p * z(4) * z(6);
  CHECK(z(1) * z1p * z3p * z1pp == z1p * z3p * z(2) * z4p + s6);
}

TEST_CASE("property: chains survive monomial specialisation") {
  // Exchanges divide exactly only by unit monomials.
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> exp(-3, 3);
  const std::vector<FormalChain> chains = {case2_chain(ResidualText::Corrected), case3_chain(2),
                                           case3_chain(3), case3_chain(4)};
  for (int trial = 0; trial < 40; ++trial) {
    const FormalChain& c = chains[trial % chains.size()];
    SymbolEnv values;
    for (const auto& name : c.indeterminates) {
      ExponentVector e(3);
      for (auto& v : e) v = exp(rng);
      values[name] = LaurentPoly::monomial(std::move(e), 1);
    }
    CHECK(verify_chain(c, values).passed());
  }
}

TEST_CASE("induction recurrences are exact over free indeterminates") {
  FormalChain c;
  for (int i = 1; i <= 8; ++i) c.indeterminates.push_back("z" + std::to_string(i));
  const SymbolEnv env = realize(induction_exchanges(5), {}, free_values(c));
  CHECK(env.count("z1{5}") == 1);
  CHECK(env.count("z4{5}") == 1);
  const LaurentPoly c0 = env.at("z2'") * env.at("z3''");
  for (int k = 3; k <= 5; ++k) {
    const auto& a0 = env.at(iterate_symbol(1, k - 1));
    const auto& a1 = env.at(iterate_symbol(1, k));
    const auto& b0 = env.at(iterate_symbol(4, k - 1));
    const auto& b1 = env.at(iterate_symbol(4, k));
    CHECK(a0 * a1 == b0 * b0 + c0);
    CHECK(b0 * b1 == a1 * a1 + c0);
    CHECK(has_nonneg_numerator(a1));
    CHECK(has_nonneg_numerator(b1));
  }
  CHECK(iterate_symbol(1, 1) == "z1'");
  CHECK(iterate_symbol(4, 2) == "z4''");
  CHECK(iterate_symbol(4, 7) == "z4{7}");
}

TEST_CASE("general product formulas at m = 3") {
  FormalChain c;
  for (int i = 1; i <= 8; ++i) c.indeterminates.push_back("z" + std::to_string(i));
  const SymbolEnv env = realize(induction_exchanges(3), case3_chain(4).residuals, free_values(c));
  auto v = [&](const std::string& s) { return env.at(s); };

  const auto derived = induction_product_formulas(3, false);
  REQUIRE(derived.size() == 2);
  // Oracle from multiplying the last chain line by z1{3}, then by z4{3}.
  const LaurentPoly c0 = v("z2'") * v("z3''");
  const LaurentPoly s8 = v("z1'") * v("z3'") * v("z1''") * v("z2") * c0 + v("z1{3}") * v("S7");
  const LaurentPoly s9 =
      v("z1'") * v("z3'") * v("z1''") * v("z4''") * v("z2") * c0 + v("z4{3}") * s8;
  CHECK(derived[0].residual == s8);
  CHECK(derived[1].residual == s9);
  CHECK(derived[0].residual_positive);
  CHECK(derived[1].residual_positive);

  const auto displayed = induction_product_formulas(3, true);
  REQUIRE(displayed.size() == 2);
  const LaurentPoly tail = v("z1'") * v("z3'") * v("z1''") * v("z4''");
  CHECK(displayed[0].residual == s8 + tail * v("z4''") * (v("z2") - v("z4''")));
  CHECK(displayed[1].residual == s9 + tail * pow(v("z1{3}"), 2) * (v("z2") - LaurentPoly::constant(8, 1)));
  CHECK_FALSE(displayed[0].residual_positive);
  CHECK_FALSE(displayed[1].residual_positive);
  CHECK_THROWS_AS(induction_product_formulas(2, true), std::invalid_argument);
}

TEST_CASE("triangulations within a few flips") {
  // The flip graph of C(1,1) is a bi-infinite path.
  CHECK(triangulations_within(MarkedAnnulus(1, 1), 3).size() == 7);
  const MarkedAnnulus an(2, 1);
  for (const auto& [t, path] : triangulations_within(an, 3)) {
    Triangulation u = initial_triangulation(an);
    for (std::size_t k : path) u = flip(u, k).triangulation;
    CHECK(u.same_arcs(t));
    CHECK(path.size() <= 3);
  }
}

TEST_CASE("cover flips commute on every triangulation a search visits") {
  const MarkedAnnulus an(3, 2);
  for (const auto& [t, path] : triangulations_within(an, 2)) {
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(verify_cover_flip(t, i, 3));
  }
}

TEST_CASE("find_pattern reports nothing for an impossible request") {
  PatternQuery query;
  query.exchanges = {{"yi", "yj", "z1z3 + z2z4"}};
  query.first_arc = [](const ArcLift&) { return false; };
  query.depth = 2;
  CHECK_FALSE(find_pattern(MarkedAnnulus(2, 1), query).has_value());
  CHECK_THROWS_AS(verify_case1(1, 1), ConstructionFailed);
}

TEST_CASE("case 1 on the annulus") {
  SUBCASE("smallest instance") {
    const IdentityReport r = verify_case1(2, 1);
    CHECK(r.passed());
  }
  SUBCASE("two boundary sides") {
    const IdentityReport r = verify_case1(3, 2, Case1Shape::BoundaryPair);
    CHECK(r.passed());
    CHECK(r.context.at("sites").find("z1=boundary, z2=boundary") != std::string::npos);
  }
  SUBCASE("peripheral loop") {
    const IdentityReport r = verify_case1(1, 2, Case1Shape::Loop);
    CHECK(r.passed());
    CHECK(r.context.at("gamma_i") == "(1@0, 1@2)");
  }
}

TEST_CASE("worked example is a degenerate case 1 exchange") {
  const Triangulation t = example_tilde_A32();
  std::vector<LaurentPoly> names;
  for (std::size_t i = 0; i < 5; ++i) names.push_back(var(5, i));
  const PtolemyRelation rel = ptolemy_relation(t, 3, names);
  CHECK(rel.rhs() == parse_poly(5, "x1 + x5"));
  const ArcLift gj = flip(t, 3).triangulation.arc(3);
  CHECK(classify_arc(gj).kind == ArcKind::Kind::Peripheral);
  CHECK(crossing_number(t.arc(3), gj, MarkedAnnulus(3, 2)) == 1);
}

TEST_CASE("peripheral arcs cross at most twice") {
  for (auto [p, q] : {std::pair{4, 2}, {5, 1}, {3, 3}}) {
    const MarkedAnnulus an(p, q);
    int best = 0;
    for (const auto& a : enumerate_arcs(an, 0)) {
      for (const auto& b : enumerate_arcs(an, 0)) {
        if (classify_arc(a).kind != ArcKind::Kind::Peripheral ||
            classify_arc(b).kind != ArcKind::Kind::Peripheral) {
          continue;
        }
        best = std::max(best, peripheral_crossing_oracle(a, b, an));
      }
    }
    CHECK(max_peripheral_crossing(an) == best);
    CHECK(best == 2);
  }
}

TEST_CASE("case 2 on the annulus") {
  const IdentityReport r = verify_case2_geometric(4, 1, 6);
  CHECK(r.passed());
  CHECK(r.find("crossing number 2")->passed);
  CHECK(r.find("formal quotients equal the mutated variables")->passed);
  CHECK(r.find("chain with corrected residuals holds on the annulus")->passed);
}

TEST_CASE("bridging induction on C(2,2)") {
  const IdentityReport r = verify_bridging_induction(2, 2, 4, 6, 3);
  CHECK(all_pass(r, "shape "));
  CHECK(all_pass(r, "crossings of "));
  CHECK(r.find("crossings of z1{4} with gamma_i = 7")->passed);
  CHECK(r.find("crossings of z4{4} with gamma_i = 8")->passed);
  CHECK(r.find("shape z4' z4'' = (z1'')^2 + z2'z3''")->passed);
  CHECK(r.find("exchange relations hold in the cluster algebra")->passed);
  CHECK(r.find("formal quotients equal the mutated variables")->passed);
  CHECK(r.find("cover flips commute along the sequence")->passed);
  CHECK(all_pass(r, "residual positive (main term with z2)"));
  CHECK(failed(r, "residual positive (as displayed)"));
  CHECK_FALSE(r.passed());
  CHECK_THROWS_AS(verify_bridging_induction(2, 2, 2), std::invalid_argument);
}

TEST_CASE("quiver recovery from denominators") {
  CHECK(verify_quiver_recovery(1, 1, 3).passed());
  CHECK(verify_quiver_recovery(2, 1, 4).passed());
  CHECK(verify_quiver_recovery(3, 2, 3).passed());
}

TEST_CASE("unistructurality experiment") {
  const IdentityReport a = verify_compatibility(1, 1, 3);
  CHECK(a.passed());
  const IdentityReport r = unistructurality_experiment(1, 1, 5);
  CHECK(r.passed());
  // Pairwise compatible pairs of the pool are exactly the clusters in range.
  CHECK(r.context.at("compatible subsets") == r.context.at("clusters"));
  CHECK(unistructurality_experiment(2, 1, 4).passed());
  CHECK_THROWS_AS(unistructurality_experiment(1, 1, 0), std::invalid_argument);
}

TEST_CASE("compatibility and cover flip reports") {
  CHECK(verify_compatibility(2, 1, 4).passed());
  std::mt19937 rng(3);
  CHECK(verify_cover_flips(2, 2, 20, rng).passed());
}

TEST_CASE("ensure_passed names the failing check") {
  IdentityReport r;
  r.name = "demo";
  CHECK_THROWS_AS(ensure_passed(r), IdentityFailed);
  r.add("first", true);
  CHECK_NOTHROW(ensure_passed(r));
  r.add("second", false, "why");
  CHECK_THROWS_WITH_AS(ensure_passed(r), "demo: second failed why", IdentityFailed);
}
