#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "clusterlab/io.hpp"
#include "support.hpp"

using namespace clusterlab;
using clusterlab::testing::parse_poly;

TEST_CASE("Laurent polynomial JSON") {
  const LaurentPoly p = parse_poly(2, "x1^-1*x2^2 + 3*x1 - 7");
  const Json j = to_json(p);
  CHECK(j == Json::parse(R"({"arity": 2, "terms": [{"e": [-1, 2], "c": "1"},
                                                  {"e": [0, 0], "c": "-7"},
                                                  {"e": [1, 0], "c": "3"}]})"));
  CHECK(laurent_from_json(j) == p);

  const LaurentPoly big =
      LaurentPoly::constant(1, Coefficient("123456789012345678901234567890"));
  CHECK(to_json(big)["terms"][0]["c"] == "123456789012345678901234567890");
  CHECK(laurent_from_json(to_json(big)) == big);

  CHECK_THROWS_AS(laurent_from_json(Json::parse(R"({"arity": 2, "terms": [{"e": [1], "c": "1"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(laurent_from_json(Json::parse(R"({"arity": 1, "terms": [{"e": [1], "c": "x"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(laurent_from_json(Json::parse(R"({"terms": []})")), std::invalid_argument);
}

TEST_CASE("property: Laurent JSON round trip") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200; ++i) {
    const LaurentPoly p = clusterlab::testing::random_poly(rng, 1 + i % 4, 6, 3);
    CHECK(laurent_from_json(Json::parse(to_json(p).dump())) == p);
  }
}

TEST_CASE("quiver and seed JSON") {
  const Quiver k = Quiver::from_arrows(2, {{0, 1}, {0, 1}});
  CHECK(to_json(k) == Json::parse(R"({"n": 2, "arrows": [[0, 1], [0, 1]]})"));
  CHECK(quiver_from_json(to_json(tilde_A_canonical(3, 2))) == tilde_A_canonical(3, 2));
  CHECK_THROWS_AS(quiver_from_json(Json::parse(R"({"n": 2, "arrows": [[0, 2]]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(quiver_from_json(Json::parse(R"({"n": 2, "arrows": [[0, 1], [1, 0]]})")),
                  std::invalid_argument);

  Seed s = initial_seed(tilde_A_canonical(2, 1));
  s = mutate_seed(mutate_seed(s, 0), 2);
  CHECK(seed_from_json(Json::parse(to_json(s).dump())) == s);
  Json bad = to_json(s);
  bad["cluster"].erase(0);
  CHECK_THROWS_AS(seed_from_json(bad), std::invalid_argument);
}

TEST_CASE("arc and triangulation JSON") {
  const ArcLift a{{0, 0}, {1, 2}};
  CHECK(to_json(a) == Json::parse(R"({"e1": {"b": 0, "pos": 0}, "e2": {"b": 1, "pos": 2}})"));
  CHECK(arc_from_json(to_json(a)) == a);
  CHECK_THROWS_AS(arc_from_json(Json::parse(R"({"e1": {"b": 2, "pos": 0}, "e2": {"b": 1, "pos": 2}})")),
                  std::invalid_argument);

  const Triangulation t = example_tilde_A32();
  const Json j = to_json(t);
  CHECK(j["p"] == 3);
  CHECK(j["q"] == 2);
  CHECK(j["arcs"].size() == 5);
  CHECK(triangulation_from_json(j).arcs() == t.arcs());
  Json crossing = j;
  crossing["arcs"][1] = to_json(flip(t, 0).quad.new_diagonal);
  CHECK_THROWS(triangulation_from_json(crossing));
}

TEST_CASE("type label JSON") {
  CHECK(to_json(TypeLabel::tilde_a(2, 1)) == Json::parse(R"({"type": "TildeA", "p": 2, "q": 1})"));
  CHECK(to_json(TypeLabel::other()) == Json::parse(R"({"type": "Other"})"));
}

TEST_CASE("exchange graph JSON and DOT") {
  const ExchangeGraph g = exchange_graph(initial_seed(tilde_A_canonical(1, 1)), 2);
  const Json j = to_json(g);
  CHECK(j["nodes"].size() == 5);
  CHECK(j["edges"].size() == 4);
  CHECK(j["nodes"][0]["depth"] == 0);
  std::set<std::string> keys;
  for (const auto& n : j["nodes"]) keys.insert(n["key"].get<std::string>());
  CHECK(keys.size() == 5);
  // The key ignores the order in which the cluster is listed.
  Seed swapped = g.node(0);
  std::swap(swapped.cluster[0], swapped.cluster[1]);
  CHECK(node_key(swapped) == node_key(g.node(0)));

  const std::string dot = to_dot(g);
  CHECK(dot.rfind("graph exchange {", 0) == 0);
  CHECK(dot.find("(1,2)\\n(0,1)") != std::string::npos);
  CHECK(dot.find("0 -- 1;") != std::string::npos);
}

TEST_CASE("identity report JSON") {
  const IdentityReport r = verify_case3(2);
  const Json j = to_json(r);
  CHECK(j["passed"] == true);
  CHECK(j["name"] == r.name);
  CHECK(j["checks"].size() == r.checks.size());
  CHECK(j["context"].contains("residuals"));
}
