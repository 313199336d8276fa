#pragma once

// Quivers without loops or 2-cycles, stored as a signed skew-symmetric
// matrix: b(i, j) > 0 is the number of arrows i -> j and b(j, i) == -b(i, j).

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clusterlab {

class LimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Arrow = std::pair<std::size_t, std::size_t>;
using Permutation = std::vector<std::size_t>;

class Quiver {
 public:
  Quiver() = default;
  explicit Quiver(std::size_t n) : n_(n), b_(n * n, 0) {}

  /// Row-major n*n matrix; throws std::invalid_argument unless it has a zero
  /// diagonal and is skew-symmetric.
  static Quiver from_matrix(std::size_t n, std::vector<int> entries);
  /// Arrow list with repetition for multiplicity. Opposite arrows between the
  /// same pair would form a 2-cycle and are rejected, as are loops.
  static Quiver from_arrows(std::size_t n, const std::vector<Arrow>& arrows);

  std::size_t size() const { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return b_[i * n_ + j]; }
  const std::vector<int>& matrix() const { return b_; }

  /// Adds m arrows i -> j (negative m adds arrows j -> i); opposite arrows
  /// cancel pairwise.
  void add_arrows(std::size_t i, std::size_t j, int m);

  /// Arrow list with repetition, sorted.
  std::vector<Arrow> arrows() const;

  bool operator==(const Quiver&) const = default;
  auto operator<=>(const Quiver&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> b_;
};

Quiver mutate(const Quiver& q, std::size_t k);
Quiver opposite(const Quiver& q);

/// Relabels so that point i of q becomes point perm[i].
Quiver permuted(const Quiver& q, const Permutation& perm);

/// Canonical representative of the isomorphism class of q, plus the order in
/// which q's points were listed to obtain it (order[t] is the point of q
/// placed at position t).
struct CanonicalLabeling {
  Quiver form;
  Permutation order;
};
CanonicalLabeling canonical_labeling(const Quiver& q);
inline Quiver canonical_form(const Quiver& q) {
  return canonical_labeling(q).form;
}

/// A permutation p with r(p[i], p[j]) == q(i, j) for all i, j, if any.
std::optional<Permutation> find_isomorphism(const Quiver& q, const Quiver& r);
inline bool are_isomorphic(const Quiver& q, const Quiver& r) {
  return find_isomorphism(q, r).has_value();
}

bool is_connected(const Quiver& q);

/// Cycle on p + q points with p arrows running one way round and q the
/// other; the Kronecker quiver when p == q == 1.
Quiver tilde_A_canonical(int p, int q);

struct TypeLabel {
  enum class Kind { TildeA, Other };
  Kind kind = Kind::Other;
  int p = 0;
  int q = 0;

  static TypeLabel tilde_a(int p, int q) { return {Kind::TildeA, p, q}; }
  static TypeLabel other() { return {}; }
  bool operator==(const TypeLabel&) const = default;
};

std::string to_string(const TypeLabel& t);

/// Isomorphism classes (as canonical forms) reachable from q by mutation.
/// Throws LimitExceeded once more than node_limit classes have been seen.
std::set<Quiver> mutation_class(const Quiver& q, std::size_t node_limit);

/// Recognises type Ã(p, q) by membership in the finite mutation class of the
/// canonical cycle. Classes are cached per (p, q).
TypeLabel classify_tilde_A(const Quiver& q,
                           std::size_t node_limit = 200000);

std::string to_dot(const Quiver& q, const std::vector<std::string>& names = {});

}  // namespace clusterlab
