#include "clusterlab/io.hpp"

#include <sstream>

namespace clusterlab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("bad JSON: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing \"") + key + "\"");
  return j.at(key);
}

template <class T>
T number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("\"") + key + "\" must be an integer");
  return v.get<T>();
}

std::string vector_text(const ExponentVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

}  // namespace

Json to_json(const LaurentPoly& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms()) {
    terms.push_back({{"e", t.exponents}, {"c", t.coeff.get_str()}});
  }
  return {{"arity", p.arity()}, {"terms", std::move(terms)}};
}

LaurentPoly laurent_from_json(const Json& j) {
  const auto arity = number<std::size_t>(j, "arity");
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) bad("\"terms\" must be an array");
  std::vector<LaurentPoly::Term> out;
  for (const auto& t : terms) {
    const Json& e = field(t, "e");
    const Json& c = field(t, "c");
    if (!e.is_array() || e.size() != arity) bad("exponent vector of the wrong length");
    LaurentPoly::Term term{e.get<ExponentVector>(), 0};
    if (c.is_string()) {
      if (term.coeff.set_str(c.get<std::string>(), 10) != 0) bad("coefficient " + c.dump());
    } else if (c.is_number_integer()) {
      term.coeff = Coefficient(c.get<long>());
    } else {
      bad("coefficient " + c.dump());
    }
    out.push_back(std::move(term));
  }
  return LaurentPoly::from_terms(arity, std::move(out));
}

Json to_json(const Quiver& q) {
  Json arrows = Json::array();
  for (const auto& [s, t] : q.arrows()) arrows.push_back({s, t});
  return {{"n", q.size()}, {"arrows", std::move(arrows)}};
}

Quiver quiver_from_json(const Json& j) {
  const auto n = number<std::size_t>(j, "n");
  std::vector<Arrow> arrows;
  for (const auto& a : field(j, "arrows")) {
    if (!a.is_array() || a.size() != 2) bad("arrow " + a.dump());
    arrows.emplace_back(a[0].get<std::size_t>(), a[1].get<std::size_t>());
    if (arrows.back().first >= n || arrows.back().second >= n) bad("arrow out of range");
  }
  return Quiver::from_arrows(n, arrows);
}

Json to_json(const Seed& s) {
  Json cluster = Json::array();
  for (const auto& x : s.cluster) cluster.push_back(to_json(x));
  return {{"quiver", to_json(s.quiver)}, {"cluster", std::move(cluster)}};
}

Seed seed_from_json(const Json& j) {
  Seed s;
  s.quiver = quiver_from_json(field(j, "quiver"));
  for (const auto& x : field(j, "cluster")) s.cluster.push_back(laurent_from_json(x));
  if (s.cluster.size() != s.quiver.size()) bad("cluster and quiver sizes differ");
  for (const auto& x : s.cluster) {
    if (x.arity() != s.cluster.front().arity()) bad("cluster variables of different arity");
  }
  return s;
}

Json to_json(const ArcLift& a) {
  return {{"e1", {{"b", a.e1.boundary}, {"pos", a.e1.pos}}},
          {"e2", {{"b", a.e2.boundary}, {"pos", a.e2.pos}}}};
}

ArcLift arc_from_json(const Json& j) {
  auto endpoint = [](const Json& e) {
    const int b = number<int>(e, "b");
    if (b != 0 && b != 1) bad("boundary must be 0 or 1");
    return Endpoint{b, number<long>(e, "pos")};
  };
  return {endpoint(field(j, "e1")), endpoint(field(j, "e2"))};
}

Json to_json(const Triangulation& t) {
  Json arcs = Json::array();
  for (const auto& a : t.arcs()) arcs.push_back(to_json(a));
  return {{"p", t.annulus().p}, {"q", t.annulus().q}, {"arcs", std::move(arcs)}};
}

Triangulation triangulation_from_json(const Json& j) {
  const MarkedAnnulus an(number<int>(j, "p"), number<int>(j, "q"));
  std::vector<ArcLift> arcs;
  for (const auto& a : field(j, "arcs")) arcs.push_back(arc_from_json(a));
  return Triangulation::from_arcs(an, std::move(arcs));
}

Json to_json(const TypeLabel& t) {
  if (t.kind == TypeLabel::Kind::Other) return {{"type", "Other"}};
  return {{"type", "TildeA"}, {"p", t.p}, {"q", t.q}};
}

std::string node_key(const Seed& s) {
  std::string out;
  for (const auto& x : canonical_seed(s).cluster) {
    if (!out.empty()) out += " | ";
    out += to_string(x);
  }
  return out;
}

Json to_json(const ExchangeGraph& g) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    nodes.push_back({{"key", node_key(g.node(i))},
                     {"depth", g.depth_of(i)},
                     {"seed", to_json(g.node(i))}});
  }
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    if (e.from < e.to) edges.push_back({e.from, e.direction, e.to});
  }
  return {{"depth", g.depth_bound()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

std::string to_dot(const ExchangeGraph& g) {
  std::ostringstream out;
  out << "graph exchange {\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::string label;
    for (const auto& x : g.node(i).cluster) {
      if (!label.empty()) label += "\\n";
      label += vector_text(denominator_vector(x));
    }
    out << "  " << i << " [label=\"" << label << "\"];\n";
  }
  for (const auto& e : g.edges()) {
    if (e.from < e.to) out << "  " << e.from << " -- " << e.to << ";\n";
  }
  out << "}\n";
  return out.str();
}

Json to_json(const IdentityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"name", r.name},
          {"passed", r.passed()},
          {"checks", std::move(checks)},
          {"witness", r.witness},
          {"context", r.context}};
}

}  // namespace clusterlab
