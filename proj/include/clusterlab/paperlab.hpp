#pragma once

// Mechanical checks of the unistructurality argument for type A-tilde: the
// product lemma, the displayed exchange chains over free indeterminates, their
// realisations on concrete annuli, quiver recovery from denominators, and a
// bounded unistructurality experiment.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/annulus.hpp"
#include "clusterlab/engine.hpp"
#include "clusterlab/expr.hpp"
#include "clusterlab/laurent.hpp"

namespace clusterlab {

class HypothesisNotSatisfied : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class SideConditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ConstructionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IdentityFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct IdentityReport {
  std::string name;
  std::vector<Check> checks;
  std::string witness;  // evidence for the first failed check
  std::map<std::string, std::string> context;

  bool passed() const;
  void add(std::string check, bool ok, std::string detail = {});
  const Check* find(const std::string& check) const;
};

/// Throws IdentityFailed naming the first failed check.
void ensure_passed(const IdentityReport& r);

// ---------------------------------------------------------------- lemma

enum class LemmaVariant { A, B };

/// Sums are written over named symbols so the side condition can be read off
/// their syntax; `values` gives each symbol's Laurent polynomial.
struct LemmaInstance {
  SymbolEnv values;
  Macros macros;
  std::string x1;
  std::string x2;
  std::vector<std::string> sigmas;  // one for variant A, three for B
  std::vector<LaurentPoly> cluster;
  LemmaVariant variant = LemmaVariant::A;
};

/// Throws HypothesisNotSatisfied or SideConditionViolated; otherwise passes
/// iff x1 or x2 is missing from the cluster.
IdentityReport verify_lemma31(const LemmaInstance& in);

LemmaInstance kronecker_lemma_instance();

// -------------------------------------------------------- formal chains

struct Exchange {
  std::string old_symbol;
  std::string new_symbol;
  std::string rhs;
};

struct Residual {
  std::string name;
  std::string definition;
};

/// An identity written as a left side followed by the successive right sides
/// of its derivation. Each exchange adjoins new_symbol = rhs / old_symbol.
struct FormalChain {
  std::string name;
  std::vector<std::string> indeterminates;
  std::vector<Exchange> exchanges;
  std::vector<Residual> residuals;
  std::vector<std::string> lines;
};

enum class ResidualText { Displayed, Corrected };

FormalChain case2_chain(ResidualText text = ResidualText::Displayed);
FormalChain case3_chain(int n);

/// Name of the k-th iterate of z_a: z1', z1'', then z1{3}, z1{4}, ...
std::string iterate_symbol(int a, int k);

/// Case-3 exchanges followed by the recurrence steps up to z1{K}, z4{K}.
std::vector<Exchange> induction_exchanges(int K);

/// Each indeterminate as a coordinate of the Laurent ring it spans.
SymbolEnv free_values(const FormalChain& c);

/// Values of every symbol of the chain: the given indeterminates, the
/// adjoined quotients and the residuals. Throws ExactDivisionFailed.
SymbolEnv realize(const std::vector<Exchange>& exchanges,
                  const std::vector<Residual>& residuals, SymbolEnv values);

IdentityReport verify_chain(const FormalChain& c, const SymbolEnv& values);
IdentityReport verify_chain(const FormalChain& c);

/// Indeterminates listed in `ones` are set to 1 first.
IdentityReport verify_case2_formal(ResidualText text = ResidualText::Displayed,
                                   const std::set<std::string>& ones = {});
IdentityReport verify_case3(int n);

/// Lemma instances read off the chains: case 2 (corrected residuals), then
/// case 3 for n = 2, 3, 4.
std::vector<LemmaInstance> chain_lemma_instances();

/// General product formulas of the induction for m = 3..K, with residuals
/// computed over free z1..z8. With `displayed` each main term ends in the
/// square of an iterate; otherwise the main terms follow the m = 2 instance
/// and carry z2.
struct ProductFormula {
  int m = 0;
  bool first = true;  // ends in z1{m}; the second ends in z4{m}
  std::string lhs;
  std::string main_term;
  LaurentPoly residual;
  bool residual_positive = false;
};

std::vector<ProductFormula> induction_product_formulas(int K, bool displayed);

// ------------------------------------------------- geometric realisation

/// Where a symbol sits in the starting triangulation: an arc id, or a
/// boundary segment when nullopt.
using SymbolSite = std::optional<std::size_t>;

struct PatternMatch {
  std::vector<std::size_t> path;  // flips from the initial triangulation
  TriangulatedSeed start;
  std::map<std::string, SymbolSite> sites;  // unprimed symbols
  std::vector<std::size_t> flipped;          // arc id flipped at each exchange
  std::vector<TriangulatedSeed> states;      // after each exchange
  std::map<std::string, ArcLift> carrier;    // arc carrying each arc symbol

  /// Concrete values of the unprimed symbols, boundary symbols set to 1.
  SymbolEnv values() const;
};

struct PatternQuery {
  std::vector<Exchange> exchanges;
  std::function<bool(const ArcLift&)> first_arc;   // filter for the first old arc
  std::function<bool(const PatternMatch&)> accept;  // filter for a full match
  int depth = 4;
};

/// Breadth-first over triangulations within `depth` flips of the initial one;
/// returns the first configuration whose flips reproduce every exchange
/// relation, each as the two side products of its Ptolemy relation.
std::optional<PatternMatch> find_pattern(const MarkedAnnulus& an, const PatternQuery& query);

/// Triangulations within `depth` flips of the initial one with their flip
/// paths.
std::vector<std::pair<Triangulation, std::vector<std::size_t>>> triangulations_within(
    const MarkedAnnulus& an, int depth);

enum class Case1Shape { Any, Loop, BoundaryPair };

IdentityReport verify_case1(int p, int q, Case1Shape shape = Case1Shape::Any, int depth = 6);

/// Largest crossing number between two peripheral arcs.
int max_peripheral_crossing(const MarkedAnnulus& an);

IdentityReport verify_case2_geometric(int p, int q, int depth);

/// Residual positivity is checked for m = 3..residual_limit (all m up to K
/// when negative).
IdentityReport verify_bridging_induction(int p, int q, int K, int depth = 6,
                                         int residual_limit = -1);

// ----------------------------------------------- recovery and structure

IdentityReport verify_quiver_recovery(int p, int q, int depth);

IdentityReport unistructurality_experiment(int p, int q, int depth);

/// crossing_number(a, b) == 0 iff their variables share a cluster, over the
/// arcs of the variables within `depth` mutations of the initial seed.
IdentityReport verify_compatibility(int p, int q, int depth);

/// verify_cover_flip on `samples` random (T, i), T a random walk of up to
/// `walk` flips.
IdentityReport verify_cover_flips(int p, int q, int samples, std::mt19937& rng,
                                  int walk = 8, long window = 3);

}  // namespace clusterlab
