#include "clusterlab/annulus.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace clusterlab {

namespace {

long floor_div(long a, long b) {
  long d = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
  return d;
}

bool key_less(const Endpoint& a, const Endpoint& b) { return a.key() < b.key(); }

// Endpoints of a chord sorted along the strip boundary.
std::pair<Endpoint, Endpoint> by_key(const ArcLift& c) {
  if (key_less(c.e2, c.e1)) return {c.e2, c.e1};
  return {c.e1, c.e2};
}

bool strictly_between(const Endpoint& lo, const Endpoint& x, const Endpoint& hi) {
  return key_less(lo, x) && key_less(x, hi);
}

// Translates k of b that can possibly interleave with a.
std::pair<long, long> shift_range(const ArcLift& a, const ArcLift& b,
                                  const MarkedAnnulus& an) {
  long reach = 0;
  for (const Endpoint& x : {a.e1, a.e2}) {
    for (const Endpoint& y : {b.e1, b.e2}) {
      reach = std::max(reach, std::abs(x.pos - y.pos) / an.period(y.boundary));
    }
  }
  return {-reach - 2, reach + 2};
}

void require_valid(const ArcLift& a, const MarkedAnnulus& an) {
  const ArcCheck c = check_arc(a, an);
  if (!c.valid()) throw InvalidArc(to_string(a) + ": " + c.reason);
}

}  // namespace

MarkedAnnulus::MarkedAnnulus(int p_, int q_) : p(p_), q(q_) {
  if (p < 1 || q < 1) {
    throw std::invalid_argument("an annulus needs a marked point on each boundary");
  }
}

Endpoint translate(Endpoint e, const MarkedAnnulus& a, long k) {
  e.pos += k * a.period(e.boundary);
  return e;
}

ArcLift translate(const ArcLift& arc, const MarkedAnnulus& a, long k) {
  return {translate(arc.e1, a, k), translate(arc.e2, a, k)};
}

ArcLift canonical(const ArcLift& arc, const MarkedAnnulus& a) {
  ArcLift out = arc;
  if (out.e2 < out.e1) std::swap(out.e1, out.e2);
  const long k = floor_div(out.e1.pos, a.period(out.e1.boundary));
  return translate(out, a, -k);
}

ArcCheck check_arc(const ArcLift& arc, const MarkedAnnulus& a) {
  for (const Endpoint& e : {arc.e1, arc.e2}) {
    if (e.boundary != 0 && e.boundary != 1) {
      return {ArcDefect::BadBoundary, "boundary must be 0 or 1"};
    }
  }
  if (arc.e1.boundary == arc.e2.boundary) {
    const long span = std::abs(arc.e1.pos - arc.e2.pos);
    if (span == 0) return {ArcDefect::Contractible, "contractible to a marked point"};
    if (span == 1) return {ArcDefect::BoundarySegment, "boundary segment"};
  }
  if (self_crossing(arc, a) != 0) {
    return {ArcDefect::SelfCrossing, "crosses its own translates"};
  }
  return {};
}

bool chords_cross(const ArcLift& a, const ArcLift& b) {
  const auto [a1, a2] = by_key(a);
  if (b.e1 == a1 || b.e1 == a2 || b.e2 == a1 || b.e2 == a2) return false;
  return strictly_between(a1, b.e1, a2) != strictly_between(a1, b.e2, a2);
}

int self_crossing(const ArcLift& a, const MarkedAnnulus& an) {
  const auto [lo, hi] = shift_range(a, a, an);
  int total = 0;
  for (long k = lo; k <= hi; ++k) {
    if (k != 0) total += chords_cross(a, translate(a, an, k));
  }
  return total;
}

int crossing_number(const ArcLift& a, const ArcLift& b, const MarkedAnnulus& an) {
  require_valid(a, an);
  require_valid(b, an);
  const auto [lo, hi] = shift_range(a, b, an);
  int total = 0;
  for (long k = lo; k <= hi; ++k) total += chords_cross(a, translate(b, an, k));
  return total;
}

ArcKind classify_arc(const ArcLift& arc) {
  if (arc.e1.boundary == arc.e2.boundary) return ArcKind::peripheral(arc.e1.boundary);
  return ArcKind::bridging();
}

std::vector<ArcLift> enumerate_arcs(const MarkedAnnulus& a, long radius) {
  std::vector<ArcLift> out;
  for (int b = 0; b < 2; ++b) {
    const int period = a.period(b);
    for (long i = 0; i < period; ++i) {
      for (long s = 2; s <= period; ++s) out.push_back({{b, i}, {b, i + s}});
    }
  }
  for (long i = 0; i < a.p; ++i) {
    for (long j = -radius; j <= radius; ++j) out.push_back({{0, i}, {1, j}});
  }
  return out;
}

Triangulation Triangulation::from_arcs(const MarkedAnnulus& a, std::vector<ArcLift> arcs) {
  if (arcs.size() != static_cast<std::size_t>(a.p + a.q)) {
    throw std::invalid_argument("a triangulation of C(p, q) has p + q arcs");
  }
  for (auto& arc : arcs) {
    require_valid(arc, a);
    arc = canonical(arc, a);
  }
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (std::size_t j = i + 1; j < arcs.size(); ++j) {
      if (arcs[i] == arcs[j]) {
        throw std::invalid_argument("repeated arc " + to_string(arcs[i]));
      }
      if (crossing_number(arcs[i], arcs[j], a) != 0) {
        throw std::invalid_argument("arcs " + to_string(arcs[i]) + " and " +
                                    to_string(arcs[j]) + " cross");
      }
    }
  }
  Triangulation t;
  t.annulus_ = a;
  t.arcs_ = std::move(arcs);
  return t;
}

std::optional<std::size_t> Triangulation::find(const ArcLift& arc) const {
  const ArcLift c = canonical(arc, annulus_);
  const auto it = std::find(arcs_.begin(), arcs_.end(), c);
  if (it == arcs_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - arcs_.begin());
}

std::optional<Side> Triangulation::edge_between(const Endpoint& u,
                                                const Endpoint& v) const {
  if (u.boundary == v.boundary) {
    const long d = std::abs(u.pos - v.pos);
    if (d == 0) return std::nullopt;
    if (d == 1) return Side::boundary();
  }
  if (auto i = find({u, v})) return Side{static_cast<int>(*i)};
  return std::nullopt;
}

std::vector<Endpoint> Triangulation::neighbors(const Endpoint& v) const {
  std::vector<Endpoint> out{{v.boundary, v.pos - 1}, {v.boundary, v.pos + 1}};
  const long period = annulus_.period(v.boundary);
  for (const auto& arc : arcs_) {
    for (int end = 0; end < 2; ++end) {
      const Endpoint& mine = end == 0 ? arc.e1 : arc.e2;
      const Endpoint& other = end == 0 ? arc.e2 : arc.e1;
      if (mine.boundary != v.boundary) continue;
      const long diff = v.pos - mine.pos;
      if (diff % period != 0) continue;
      out.push_back(translate(other, annulus_, diff / period));
    }
  }
  std::sort(out.begin(), out.end(), key_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Triangulation::same_arcs(const Triangulation& other) const {
  if (!(annulus_ == other.annulus_)) return false;
  std::set<ArcLift> a(arcs_.begin(), arcs_.end());
  std::set<ArcLift> b(other.arcs_.begin(), other.arcs_.end());
  return a == b;
}

Triangulation initial_triangulation(const MarkedAnnulus& a) {
  std::vector<ArcLift> arcs;
  for (long i = 0; i < a.p; ++i) arcs.push_back({{0, i}, {1, 0}});
  for (long m = -1; m >= -a.q; --m) arcs.push_back({{0, 0}, {1, m}});
  return Triangulation::from_arcs(a, std::move(arcs));
}

std::vector<Triangle> triangles(const Triangulation& t) {
  std::vector<Triangle> out;
  const MarkedAnnulus& an = t.annulus();
  for (int b = 0; b < 2; ++b) {
    for (long x = 0; x < an.period(b); ++x) {
      const Endpoint v{b, x};
      std::vector<Endpoint> later;
      for (const auto& w : t.neighbors(v)) {
        if (key_less(v, w)) later.push_back(w);
      }
      for (std::size_t i = 0; i < later.size(); ++i) {
        for (std::size_t j = i + 1; j < later.size(); ++j) {
          const auto closing = t.edge_between(later[i], later[j]);
          if (!closing) continue;
          Triangle tri{{v, later[i], later[j]},
                       {*t.edge_between(v, later[i]), *closing,
                        *t.edge_between(later[j], v)}};
          out.push_back(tri);
        }
      }
    }
  }
  return out;
}

Quiver quiver_of(const Triangulation& t) {
  Quiver q(t.size());
  for (const auto& tri : triangles(t)) {
    for (std::size_t s = 0; s < 3; ++s) {
      const Side& from = tri.sides[s];
      const Side& to = tri.sides[(s + 1) % 3];
      if (from.is_boundary() || to.is_boundary() || from.arc == to.arc) continue;
      q.add_arrows(static_cast<std::size_t>(from.arc), static_cast<std::size_t>(to.arc), 1);
    }
  }
  return q;
}

FlipResult flip(const Triangulation& t, std::size_t gamma) {
  const ArcLift& g = t.arc(gamma);
  const auto [u, v] = by_key(g);
  std::optional<Endpoint> w1, w2;
  const auto nu = t.neighbors(u);
  for (const auto& w : t.neighbors(v)) {
    if (w == u || !std::binary_search(nu.begin(), nu.end(), w, key_less)) continue;
    auto& slot = strictly_between(u, w, v) ? w1 : w2;
    if (slot) throw std::logic_error("flip: two triangles on one side of an arc");
    slot = w;
  }
  if (!w1 || !w2) throw std::logic_error("flip: arc is not interior to two triangles");

  Quadrilateral quad{*t.edge_between(u, *w1), *t.edge_between(*w1, v),
                     *t.edge_between(v, *w2), *t.edge_between(*w2, u), g,
                     ArcLift{*w1, *w2}};
  std::vector<ArcLift> arcs = t.arcs();
  arcs[gamma] = quad.new_diagonal;
  return {Triangulation::from_arcs(t.annulus(), std::move(arcs)), quad};
}

PtolemyRelation ptolemy_relation(const Triangulation& t, std::size_t gamma,
                                 std::span<const LaurentPoly> assignment) {
  if (assignment.size() != t.size()) {
    throw std::invalid_argument("ptolemy_relation needs a variable for every arc");
  }
  const Quadrilateral quad = flip(t, gamma).quad;
  const std::size_t arity = assignment.front().arity();
  auto value = [&](const Side& s) {
    return s.is_boundary() ? LaurentPoly::constant(arity, 1)
                           : assignment[static_cast<std::size_t>(s.arc)];
  };
  return {value(quad.alpha) * value(quad.delta), value(quad.beta) * value(quad.epsilon)};
}

TriangulatedSeed initial_triangulated_seed(const MarkedAnnulus& a) {
  Triangulation t = initial_triangulation(a);
  Seed s = initial_seed(quiver_of(t));
  return {std::move(t), std::move(s)};
}

TriangulatedSeed flip_and_mutate(const TriangulatedSeed& ts, std::size_t k) {
  return {flip(ts.triangulation, k).triangulation, mutate_seed(ts.seed, k)};
}

ArcPath reach_arc(const TriangulatedSeed& start, const ArcLift& target,
                  std::mt19937* tie_break, std::size_t max_flips) {
  const MarkedAnnulus& an = start.triangulation.annulus();
  require_valid(target, an);
  ArcPath path{start, 0, {}};
  while (true) {
    const Triangulation& t = path.end.triangulation;
    if (auto i = t.find(target)) {
      path.index = *i;
      return path;
    }
    if (path.flips.size() >= max_flips) {
      throw NonTermination("no triangulation containing " + to_string(target) +
                           " within " + std::to_string(max_flips) + " flips");
    }
    struct Candidate {
      int crossing;
      ArcLift arc;
      std::size_t index;
    };
    std::vector<Candidate> decreasing;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const int before = crossing_number(t.arc(k), target, an);
      if (before == 0) continue;
      const ArcLift after = flip(t, k).triangulation.arc(k);
      if (crossing_number(after, target, an) < before) {
        decreasing.push_back({before, t.arc(k), k});
      }
    }
    if (decreasing.empty()) {
      throw NonTermination("no flip lowers the crossing with " + to_string(target));
    }
    std::size_t pick;
    if (tie_break) {
      pick = decreasing[(*tie_break)() % decreasing.size()].index;
    } else {
      pick = std::min_element(decreasing.begin(), decreasing.end(),
                              [](const Candidate& a, const Candidate& b) {
                                if (a.crossing != b.crossing) return a.crossing > b.crossing;
                                return a.arc < b.arc;
                              })
                 ->index;
    }
    path.end = flip_and_mutate(path.end, pick);
    path.flips.push_back(pick);
  }
}

LaurentPoly variable_of_arc(const MarkedAnnulus& a, const ArcLift& arc,
                            std::mt19937* tie_break) {
  const ArcPath path = reach_arc(initial_triangulated_seed(a), arc, tie_break);
  return path.end.seed.cluster[path.index];
}

std::vector<LiftedArc> lift_triangulation(const Triangulation& t, long window) {
  if (window < 1) throw std::invalid_argument("lift window must be positive");
  std::vector<LiftedArc> out;
  for (long k = 0; k < window; ++k) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      out.push_back({i, k, translate(t.arc(i), t.annulus(), k)});
    }
  }
  return out;
}

namespace {

// A finite piece of a triangulation of the strip, with no deck structure.
class StripPiece {
 public:
  explicit StripPiece(std::vector<ArcLift> chords) {
    for (const auto& c : chords) add(c);
  }

  void add(const ArcLift& c) {
    edges_.insert(ordered(c));
    adjacent_[c.e1].insert(c.e2);
    adjacent_[c.e2].insert(c.e1);
  }

  void remove(const ArcLift& c) {
    edges_.erase(ordered(c));
    adjacent_[c.e1].erase(c.e2);
    adjacent_[c.e2].erase(c.e1);
  }

  bool joined(const Endpoint& u, const Endpoint& v) const {
    if (u.boundary == v.boundary && std::abs(u.pos - v.pos) == 1) return true;
    return edges_.contains(ordered({u, v}));
  }

  // The other diagonal of the quadrilateral around c, when both of its
  // triangles are present.
  std::optional<ArcLift> flipped(const ArcLift& c) const {
    const auto [u, v] = by_key(c);
    std::optional<Endpoint> w1, w2;
    for (const auto& w : candidates(u)) {
      if (w == v || !joined(w, v)) continue;
      (strictly_between(u, w, v) ? w1 : w2) = w;
    }
    if (!w1 || !w2) return std::nullopt;
    return ArcLift{*w1, *w2};
  }

  const std::set<ArcLift>& edges() const { return edges_; }

 private:
  static ArcLift ordered(const ArcLift& c) {
    return c.e2 < c.e1 ? ArcLift{c.e2, c.e1} : c;
  }

  std::vector<Endpoint> candidates(const Endpoint& u) const {
    std::vector<Endpoint> out{{u.boundary, u.pos - 1}, {u.boundary, u.pos + 1}};
    if (auto it = adjacent_.find(u); it != adjacent_.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
  }

  std::set<ArcLift> edges_;
  std::map<Endpoint, std::set<Endpoint>> adjacent_;
};

bool inside(const ArcLift& c, const MarkedAnnulus& an, long window) {
  for (const Endpoint& e : {c.e1, c.e2}) {
    if (e.pos < 0 || e.pos > window * an.period(e.boundary)) return false;
  }
  return true;
}

}  // namespace

bool verify_cover_flip(const Triangulation& t, std::size_t i, long window) {
  if (window < 2) throw std::invalid_argument("cover flip check needs window >= 2");
  if (i >= t.size()) throw std::out_of_range("arc id out of range");
  const MarkedAnnulus& an = t.annulus();

  // translates reaching into the window start within `margin` periods of it
  long margin = 0;
  for (const auto& arc : t.arcs()) {
    for (const Endpoint& e : {arc.e1, arc.e2}) {
      margin = std::max(margin, std::abs(e.pos) / an.period(e.boundary) + 1);
    }
  }
  const Triangulation after = flip(t, i).triangulation;
  for (const auto& arc : after.arcs()) {
    for (const Endpoint& e : {arc.e1, arc.e2}) {
      margin = std::max(margin, std::abs(e.pos) / an.period(e.boundary) + 1);
    }
  }
  const long lo = -3 * margin - 2;
  const long hi = window + 3 * margin + 2;

  std::vector<ArcLift> lifted;
  std::vector<ArcLift> targets;
  for (long k = lo; k < hi; ++k) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      lifted.push_back(translate(t.arc(j), an, k));
      if (j == i) targets.push_back(lifted.back());
    }
  }
  StripPiece strip(lifted);
  for (const auto& c : targets) {
    // lifts of one arc never share a triangle, so the flips do not interact
    if (auto d = strip.flipped(c)) {
      strip.remove(c);
      strip.add(*d);
    } else if (inside(c, an, window)) {
      return false;
    }
  }

  std::set<ArcLift> got;
  for (const auto& c : strip.edges()) {
    if (inside(c, an, window)) got.insert(c);
  }
  std::set<ArcLift> expected;
  for (long k = lo; k < hi; ++k) {
    for (const auto& arc : after.arcs()) {
      ArcLift c = translate(arc, an, k);
      if (c.e2 < c.e1) std::swap(c.e1, c.e2);
      if (inside(c, an, window)) expected.insert(c);
    }
  }
  if (got != expected) return false;
  for (const auto& a : got) {
    for (const auto& b : got) {
      if (chords_cross(a, b)) return false;
    }
  }
  return true;
}

Triangulation example_tilde_A32() {
  return Triangulation::from_arcs(MarkedAnnulus(3, 2), {{{0, 0}, {1, -1}},
                                                       {{0, 1}, {1, 1}},
                                                       {{0, 2}, {1, 1}},
                                                       {{0, 0}, {1, 0}},
                                                       {{0, 0}, {1, 1}}});
}

std::string to_string(const Endpoint& e) {
  return std::to_string(e.boundary) + "@" + std::to_string(e.pos);
}

std::string to_string(const ArcLift& a) {
  return "(" + to_string(a.e1) + ", " + to_string(a.e2) + ")";
}

}  // namespace clusterlab
