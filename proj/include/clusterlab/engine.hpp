#pragma once

// Seeds, the exchange relation and depth-bounded exchange graphs. All cluster
// variables live in one coordinate frame: Laurent polynomials in the cluster
// of the seed the computation started from.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterlab/laurent.hpp"
#include "clusterlab/quiver.hpp"

namespace clusterlab {

/// The exchange numerator did not divide exactly. The Laurent phenomenon
/// rules this out, so it always indicates a bug.
class ExactDivisionFailed : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NoPartnerFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AmbiguousPartner : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotTwoMonomials : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InconsistentOrientation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Seed {
  Quiver quiver;
  std::vector<LaurentPoly> cluster;

  std::size_t rank() const { return cluster.size(); }
  bool operator==(const Seed&) const = default;
};

Seed initial_seed(const Quiver& q);

/// Product over arrows leaving k plus product over arrows entering k.
LaurentPoly exchange_numerator(const Seed& s, std::size_t k);

Seed mutate_seed(const Seed& s, std::size_t k);

/// Cluster sorted by the LaurentPoly order, quiver permuted to match.
Seed canonical_seed(const Seed& s);

struct ExchangeEdge {
  std::size_t from;
  std::size_t direction;  // index into the canonical cluster of `from`
  std::size_t to;

  bool operator==(const ExchangeEdge&) const = default;
};

class ExchangeGraph {
 public:
  const std::vector<Seed>& nodes() const { return nodes_; }
  const Seed& node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return 0; }
  int depth_bound() const { return depth_bound_; }
  /// BFS distance of node i from the root.
  int depth_of(std::size_t i) const { return depth_.at(i); }
  /// Neighbour of node i in direction k, if explored.
  std::optional<std::size_t> neighbor(std::size_t i, std::size_t k) const {
    return adjacency_.at(i).at(k);
  }
  std::size_t degree(std::size_t i) const;
  /// Every explored edge, once per endpoint.
  std::vector<ExchangeEdge> edges() const;
  /// Node whose cluster equals `cluster` as a set.
  std::optional<std::size_t> find(std::vector<LaurentPoly> cluster) const;
  /// Union of all clusters.
  std::set<LaurentPoly> variables() const;

  friend ExchangeGraph exchange_graph(const Seed& start, int depth,
                                      std::size_t node_limit);

 private:
  std::vector<Seed> nodes_;
  std::vector<int> depth_;
  std::vector<std::vector<std::optional<std::size_t>>> adjacency_;
  std::map<std::vector<LaurentPoly>, std::size_t> index_;
  int depth_bound_ = 0;
};

/// Breadth-first enumeration of seeds within `depth` mutations of `start`,
/// deduplicated by canonical seed. Throws LimitExceeded past node_limit.
ExchangeGraph exchange_graph(const Seed& start, int depth,
                             std::size_t node_limit = 100000);

std::set<LaurentPoly> variables_up_to_depth(const Seed& start, int depth,
                                            std::size_t node_limit = 100000);

using DenominatorVector = ExponentVector;
DenominatorVector denominator_vector(const LaurentPoly& v);

/// Determinant of the Jacobian matrix d vs[i] / d x_j, expanded exactly.
LaurentPoly jacobian_determinant(std::span<const LaurentPoly> vs);
bool is_algebraically_independent(std::span<const LaurentPoly> vs);

struct PositivityReport {
  std::size_t checked = 0;
  std::vector<LaurentPoly> violations;

  bool passed() const { return violations.empty(); }
};

PositivityReport positivity_audit(const Seed& start, int depth,
                                  std::size_t node_limit = 100000);

/// Reads off the quiver at cluster z from the exchange partners found in
/// `pool`. z must consist of the frame's coordinate variables (in any order),
/// so denominator vectors are taken directly from the frame. The result is
/// the quiver of z up to a global opposite.
Quiver infer_exchange_quiver(std::span<const LaurentPoly> z,
                             const std::set<LaurentPoly>& pool);

/// Bounded search for a violation of the cluster-automorphism conditions by
/// the substitution x_i -> images[i]. `start` must be the coordinate seed of
/// its frame. false is conclusive; true means no violation within depth.
bool check_automorphism_candidate(const Seed& start,
                                  std::span<const LaurentPoly> images,
                                  int depth, std::size_t node_limit = 100000);

}  // namespace clusterlab
