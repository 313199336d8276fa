#pragma once

// The marked annulus C(p, q) through its universal cover, an infinite strip.
// Boundary 0 lifts to the bottom line and boundary 1 to the top line; marked
// points sit at integer positions and the deck translation by k shifts
// bottom positions by k*p and top positions by k*q. An arc is stored as one
// lift (a chord of the strip) modulo deck translation.

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clusterlab/engine.hpp"
#include "clusterlab/laurent.hpp"
#include "clusterlab/quiver.hpp"

namespace clusterlab {

class InvalidArc : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonTermination : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct MarkedAnnulus {
  int p = 1;  // marked points on boundary 0
  int q = 1;  // marked points on boundary 1

  MarkedAnnulus() = default;
  MarkedAnnulus(int p_, int q_);

  int period(int boundary) const { return boundary == 0 ? p : q; }
  bool operator==(const MarkedAnnulus&) const = default;
};

struct Endpoint {
  int boundary = 0;
  long pos = 0;

  /// Position in the cyclic order of the strip boundary: the bottom line left
  /// to right, then the top line right to left.
  std::pair<int, long> key() const { return {boundary, boundary == 0 ? pos : -pos}; }
  bool operator==(const Endpoint&) const = default;
  auto operator<=>(const Endpoint&) const = default;
};

struct ArcLift {
  Endpoint e1;
  Endpoint e2;

  bool operator==(const ArcLift&) const = default;
  auto operator<=>(const ArcLift&) const = default;
};

Endpoint translate(Endpoint e, const MarkedAnnulus& a, long k);
ArcLift translate(const ArcLift& arc, const MarkedAnnulus& a, long k);

/// Endpoints ordered (boundary 0 first, then smaller position) and translated
/// so the first lies in [0, period).
ArcLift canonical(const ArcLift& arc, const MarkedAnnulus& a);

enum class ArcDefect { None, BadBoundary, Contractible, BoundarySegment, SelfCrossing };

struct ArcCheck {
  ArcDefect defect = ArcDefect::None;
  std::string reason;

  bool valid() const { return defect == ArcDefect::None; }
};

ArcCheck check_arc(const ArcLift& arc, const MarkedAnnulus& a);
inline bool is_valid_arc(const ArcLift& arc, const MarkedAnnulus& a) {
  return check_arc(arc, a).valid();
}

/// Strict interleaving of two chords of the strip; shared endpoints never
/// count.
bool chords_cross(const ArcLift& a, const ArcLift& b);

/// Sum over deck translates of b of chords_cross(a, translate(b, k)).
/// Throws InvalidArc on an invalid input.
int crossing_number(const ArcLift& a, const ArcLift& b, const MarkedAnnulus& an);

/// Chord crossings of a with its own nonzero translates.
int self_crossing(const ArcLift& a, const MarkedAnnulus& an);

struct ArcKind {
  enum class Kind { Peripheral, Bridging };
  Kind kind = Kind::Bridging;
  int boundary = -1;  // for peripheral arcs

  static ArcKind bridging() { return {}; }
  static ArcKind peripheral(int b) { return {Kind::Peripheral, b}; }
  bool operator==(const ArcKind&) const = default;
};

ArcKind classify_arc(const ArcLift& arc);

/// Canonical valid arcs: every peripheral arc, and the bridging arcs with top
/// position in [-radius, radius].
std::vector<ArcLift> enumerate_arcs(const MarkedAnnulus& a, long radius);

/// A side of a triangle: an interior arc index, or a boundary segment.
struct Side {
  int arc = -1;  // -1 for a boundary segment

  bool is_boundary() const { return arc < 0; }
  static Side boundary() { return {}; }
  bool operator==(const Side&) const = default;
};

struct Triangle {
  std::array<Endpoint, 3> vertices;  // one lift, in cyclic order of the strip
  std::array<Side, 3> sides;         // v0v1, v1v2, v2v0
};

class Triangulation {
 public:
  /// Validates: p + q distinct valid arcs, pairwise non-crossing. Arcs are
  /// stored canonically in the given order; the order fixes the arc ids.
  static Triangulation from_arcs(const MarkedAnnulus& a, std::vector<ArcLift> arcs);

  const MarkedAnnulus& annulus() const { return annulus_; }
  const std::vector<ArcLift>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  const ArcLift& arc(std::size_t i) const { return arcs_.at(i); }
  std::optional<std::size_t> find(const ArcLift& arc) const;

  /// Edge of the lifted triangulation between two strip vertices, if any.
  std::optional<Side> edge_between(const Endpoint& u, const Endpoint& v) const;
  /// Strip vertices joined to v by a lifted arc or boundary segment.
  std::vector<Endpoint> neighbors(const Endpoint& v) const;

  /// Arcs as a set: equal triangulations may list them in different orders.
  bool same_arcs(const Triangulation& other) const;

 private:
  MarkedAnnulus annulus_;
  std::vector<ArcLift> arcs_;
};

Triangulation initial_triangulation(const MarkedAnnulus& a);

/// One triangle per deck orbit, sides in the cyclic order of the strip.
std::vector<Triangle> triangles(const Triangulation& t);

/// One point per arc; every triangle contributes arrows side0 -> side1 ->
/// side2 -> side0 between its interior sides.
Quiver quiver_of(const Triangulation& t);

/// Sides of the flip quadrilateral of arc gamma = (u, v) with third vertices
/// w1 and w2: alpha = u w1, beta = w1 v, delta = v w2, epsilon = w2 u.
struct Quadrilateral {
  Side alpha, beta, delta, epsilon;
  ArcLift old_diagonal;
  ArcLift new_diagonal;
};

struct FlipResult {
  Triangulation triangulation;  // the new arc keeps the id of the old one
  Quadrilateral quad;
};

FlipResult flip(const Triangulation& t, std::size_t gamma);

struct PtolemyRelation {
  LaurentPoly first;   // x_alpha x_delta
  LaurentPoly second;  // x_beta x_epsilon

  LaurentPoly rhs() const { return first + second; }
};

/// x_gamma x_gamma' = x_alpha x_delta + x_beta x_epsilon with boundary sides
/// replaced by 1.
PtolemyRelation ptolemy_relation(const Triangulation& t, std::size_t gamma,
                                 std::span<const LaurentPoly> assignment);

/// A triangulation paired with the seed whose cluster variable i sits on arc i.
struct TriangulatedSeed {
  Triangulation triangulation;
  Seed seed;
};

TriangulatedSeed initial_triangulated_seed(const MarkedAnnulus& a);

/// Flips arc k and mutates the seed at k in lockstep.
TriangulatedSeed flip_and_mutate(const TriangulatedSeed& ts, std::size_t k);

/// Flips towards a triangulation containing `target`, each flip strictly
/// lowering the total crossing with it. Among decreasing flips the arc with
/// the most crossings goes first and ties go to the smallest canonical arc;
/// with `tie_break` any decreasing flip may be drawn instead.
struct ArcPath {
  TriangulatedSeed end;
  std::size_t index = 0;  // id of target in end.triangulation
  std::vector<std::size_t> flips;
};

ArcPath reach_arc(const TriangulatedSeed& start, const ArcLift& target,
                  std::mt19937* tie_break = nullptr, std::size_t max_flips = 10000);

/// Cluster variable of an arc, in the frame of initial_triangulated_seed.
LaurentPoly variable_of_arc(const MarkedAnnulus& a, const ArcLift& arc,
                            std::mt19937* tie_break = nullptr);

struct LiftedArc {
  std::size_t index;
  long shift;
  ArcLift chord;

  bool operator==(const LiftedArc&) const = default;
};

/// Translates of every arc by shifts 0 .. window-1.
std::vector<LiftedArc> lift_triangulation(const Triangulation& t, long window);

/// Flips every lift of arc i inside the strip and compares the chords within
/// `window` periods against the lift of flip(t, i); also checks the flipped
/// strip triangulation stays non-crossing there.
bool verify_cover_flip(const Triangulation& t, std::size_t i, long window);

/// A triangulation of C(3, 2) whose fourth arc (id 3) flips to the
/// peripheral loop on boundary 1, with x4 x4' = x1 + x5.
Triangulation example_tilde_A32();

std::string to_string(const Endpoint& e);
std::string to_string(const ArcLift& a);

}  // namespace clusterlab
