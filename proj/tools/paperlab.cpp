// Command-line front end: JSON in, JSON out.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "clusterlab/io.hpp"

using namespace clusterlab;

namespace {

Json read_json(const std::string& path) {
  try {
    if (path == "-") return Json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

struct VerifyOptions {
  std::string report = "all";
  std::optional<int> p, q, depth, K;
  int residual_limit = -1;
  int samples = 20;
  unsigned seed_rng = 1;
  bool corrected = false;
  std::string shape = "any";
};

using Runner = std::function<std::vector<IdentityReport>(const VerifyOptions&, std::mt19937&)>;

IdentityReport failed_report(const std::string& name, const std::exception& e) {
  IdentityReport r;
  r.name = name;
  r.add("completed", false, e.what());
  r.witness = e.what();
  return r;
}

Case1Shape parse_shape(const std::string& s) {
  if (s == "loop") return Case1Shape::Loop;
  if (s == "boundary-pair") return Case1Shape::BoundaryPair;
  return Case1Shape::Any;
}

std::vector<std::pair<int, int>> annuli(const VerifyOptions& o,
                                        std::vector<std::pair<int, int>> defaults) {
  if (o.p || o.q) return {{o.p.value_or(defaults.front().first), o.q.value_or(defaults.front().second)}};
  return defaults;
}

std::vector<std::pair<std::string, Runner>> runners() {
  std::vector<std::pair<std::string, Runner>> out;
  out.emplace_back("lemma31", [](const VerifyOptions&, std::mt19937&) {
    std::vector<IdentityReport> rs{verify_lemma31(kronecker_lemma_instance())};
    for (const auto& in : chain_lemma_instances()) rs.push_back(verify_lemma31(in));
    return rs;
  });
  out.emplace_back("case1", [](const VerifyOptions& o, std::mt19937&) {
    std::vector<IdentityReport> rs;
    if (o.p || o.q) {
      rs.push_back(verify_case1(o.p.value_or(2), o.q.value_or(1), parse_shape(o.shape),
                                o.depth.value_or(6)));
      return rs;
    }
    rs.push_back(verify_case1(2, 1, Case1Shape::Any));
    rs.push_back(verify_case1(3, 2, Case1Shape::BoundaryPair));
    rs.push_back(verify_case1(1, 2, Case1Shape::Loop));
    return rs;
  });
  out.emplace_back("case2-formal", [](const VerifyOptions& o, std::mt19937&) {
    return std::vector{verify_case2_formal(o.corrected ? ResidualText::Corrected
                                                       : ResidualText::Displayed)};
  });
  out.emplace_back("case2-geometric", [](const VerifyOptions& o, std::mt19937&) {
    return std::vector{verify_case2_geometric(o.p.value_or(4), o.q.value_or(1), o.depth.value_or(6))};
  });
  for (int n = 2; n <= 4; ++n) {
    out.emplace_back("case3-n" + std::to_string(n), [n](const VerifyOptions&, std::mt19937&) {
      return std::vector{verify_case3(n)};
    });
  }
  out.emplace_back("induction", [](const VerifyOptions& o, std::mt19937&) {
    return std::vector{verify_bridging_induction(o.p.value_or(2), o.q.value_or(2), o.K.value_or(4),
                                                 o.depth.value_or(6), o.residual_limit)};
  });
  out.emplace_back("quiver-recovery", [](const VerifyOptions& o, std::mt19937&) {
    std::vector<IdentityReport> rs;
    for (auto [p, q] : annuli(o, {{1, 1}, {2, 1}, {3, 2}})) {
      rs.push_back(verify_quiver_recovery(p, q, o.depth.value_or(3)));
    }
    return rs;
  });
  out.emplace_back("unistructurality", [](const VerifyOptions& o, std::mt19937&) {
    std::vector<IdentityReport> rs;
    if (o.p || o.q) {
      rs.push_back(unistructurality_experiment(o.p.value_or(1), o.q.value_or(1), o.depth.value_or(4)));
      return rs;
    }
    rs.push_back(unistructurality_experiment(1, 1, o.depth.value_or(5)));
    rs.push_back(unistructurality_experiment(2, 1, o.depth.value_or(4)));
    return rs;
  });
  out.emplace_back("compatibility", [](const VerifyOptions& o, std::mt19937&) {
    return std::vector{verify_compatibility(o.p.value_or(2), o.q.value_or(1), o.depth.value_or(4))};
  });
  out.emplace_back("cover-flip", [](const VerifyOptions& o, std::mt19937& rng) {
    std::vector<IdentityReport> rs;
    for (auto [p, q] : annuli(o, {{2, 1}, {2, 2}, {3, 2}})) {
      rs.push_back(verify_cover_flips(p, q, o.samples, rng));
    }
    return rs;
  });
  return out;
}

int run_verify(const VerifyOptions& o) {
  std::mt19937 rng(o.seed_rng);
  Json reports = Json::array();
  bool all_passed = true;
  bool known = false;
  for (const auto& [name, run] : runners()) {
    if (o.report != "all" && o.report != name) continue;
    known = true;
    const auto start = std::chrono::steady_clock::now();
    std::vector<IdentityReport> rs;
    try {
      rs = run(o, rng);
    } catch (const std::exception& e) {
      rs.push_back(failed_report(name, e));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& r : rs) {
      all_passed = all_passed && r.passed();
      Json j = to_json(r);
      j["report"] = name;
      reports.push_back(std::move(j));
      std::cerr << (r.passed() ? "PASS " : "FAIL ") << name << ": " << r.name;
      for (const char* key : {"annulus", "quiver", "depth"}) {
        if (auto it = r.context.find(key); it != r.context.end()) std::cerr << " " << it->second;
      }
      std::cerr << "\n";
    }
    std::cerr << "  " << name << " took " << secs << " s\n";
  }
  if (!known) throw CLI::ValidationError("--report", "unknown report " + o.report);
  print(reports);
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster algebras of type A-tilde: seeds, quivers, annulus triangulations and "
               "verification reports"};
  app.require_subcommand(1);

  std::string quiver_file, seed_file, tri_file, arc_file, dot_file;
  std::size_t at = 0;
  int depth = 3, p = 1, q = 1;
  std::size_t limit = 100000;
  bool trace = false;

  auto* mq = app.add_subcommand("mutate-quiver", "Mutate a quiver at a point (0-based)");
  mq->add_option("--quiver", quiver_file, "Quiver JSON file, - for stdin")->required();
  mq->add_option("--at", at, "Point to mutate at")->required();

  auto* ms = app.add_subcommand("mutate-seed", "Mutate a seed in a direction (0-based)");
  ms->add_option("--seed", seed_file, "Seed JSON file, - for stdin")->required();
  ms->add_option("--at", at, "Direction")->required();
  ms->add_flag("--trace", trace, "Also print the exchange relation");

  auto* eg = app.add_subcommand("exchange-graph", "Enumerate the exchange graph to a depth");
  eg->add_option("--seed", seed_file, "Seed JSON file, - for stdin")->required();
  eg->add_option("--depth", depth, "Mutation depth")->required();
  eg->add_option("--limit", limit, "Node limit")->capture_default_str();
  eg->add_option("--dot", dot_file, "Also write DOT with denominator-vector labels here");

  auto* cl = app.add_subcommand("classify", "Recognise a quiver of type A-tilde(p,q)");
  cl->add_option("--quiver", quiver_file, "Quiver JSON file, - for stdin")->required();
  cl->add_option("--limit", limit, "Mutation-class node limit")->default_val(200000);

  auto* an = app.add_subcommand("annulus", "Triangulations of the annulus");
  an->require_subcommand(1);
  std::size_t arc_id = 0;
  auto* af = an->add_subcommand("flip", "Flip an arc (0-based id)");
  af->add_option("--triangulation", tri_file, "Triangulation JSON file, - for stdin")->required();
  af->add_option("--arc", arc_id, "Arc id")->required();
  auto* av = an->add_subcommand("variable", "Cluster variable of an arc");
  av->add_option("--p", p, "Marked points on boundary 0")->required();
  av->add_option("--q", q, "Marked points on boundary 1")->required();
  av->add_option("--arc", arc_file, "Arc JSON file, - for stdin")->required();

  VerifyOptions vo;
  auto* vf = app.add_subcommand("verify", "Run verification reports; exit 0 iff all pass");
  vf->add_option("--report", vo.report, "Report name or all")
      ->check(CLI::IsMember({"lemma31", "case1", "case2-formal", "case2-geometric", "case3-n2",
                             "case3-n3", "case3-n4", "induction", "quiver-recovery",
                             "unistructurality", "compatibility", "cover-flip", "all"}))
      ->capture_default_str();
  vf->add_option("--p", vo.p, "Marked points on boundary 0");
  vf->add_option("--q", vo.q, "Marked points on boundary 1");
  vf->add_option("--depth", vo.depth, "Search or enumeration depth");
  vf->add_option("--K", vo.K, "Last iterate of the induction");
  vf->add_option("--residual-limit", vo.residual_limit,
                 "Check induction residuals up to this m (negative: up to K)")
      ->capture_default_str();
  vf->add_option("--samples", vo.samples, "Samples per annulus for cover-flip")->capture_default_str();
  vf->add_option("--seed-rng", vo.seed_rng, "Random seed")->capture_default_str();
  vf->add_flag("--corrected", vo.corrected, "case2-formal with primed residual factors");
  vf->add_option("--shape", vo.shape, "case1 shape when --p/--q are given")
      ->check(CLI::IsMember({"any", "loop", "boundary-pair"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mq) {
      print(to_json(mutate(quiver_from_json(read_json(quiver_file)), at)));
    } else if (*ms) {
      const Seed s = seed_from_json(read_json(seed_file));
      if (at >= s.rank()) throw std::out_of_range("direction out of range");
      const Seed t = mutate_seed(s, at);
      if (!trace) {
        print(to_json(t));
      } else {
        print({{"seed", to_json(t)},
               {"trace",
                {{"direction", at},
                 {"old", to_string(s.cluster[at])},
                 {"new", to_string(t.cluster[at])},
                 {"numerator", to_string(exchange_numerator(s, at))}}}});
      }
    } else if (*eg) {
      const ExchangeGraph g = exchange_graph(seed_from_json(read_json(seed_file)), depth, limit);
      if (!dot_file.empty()) write_text(dot_file, to_dot(g));
      print(to_json(g));
    } else if (*cl) {
      print(to_json(classify_tilde_A(quiver_from_json(read_json(quiver_file)), limit)));
    } else if (*af) {
      const Triangulation t = triangulation_from_json(read_json(tri_file));
      if (arc_id >= t.size()) throw std::out_of_range("arc id out of range");
      const FlipResult f = flip(t, arc_id);
      print({{"triangulation", to_json(f.triangulation)},
             {"old_arc", to_json(f.quad.old_diagonal)},
             {"new_arc", to_json(f.quad.new_diagonal)}});
    } else if (*av) {
      const MarkedAnnulus a(p, q);
      const ArcLift arc = arc_from_json(read_json(arc_file));
      const LaurentPoly v = variable_of_arc(a, arc);
      print({{"arc", to_json(canonical(arc, a))}, {"variable", to_json(v)}, {"text", to_string(v)}});
    } else if (*vf) {
      return run_verify(vo);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
