#include "clusterlab/engine.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace clusterlab {

Seed initial_seed(const Quiver& q) {
  Seed s{q, {}};
  for (std::size_t i = 0; i < q.size(); ++i) {
    s.cluster.push_back(LaurentPoly::variable(q.size(), i));
  }
  return s;
}

LaurentPoly exchange_numerator(const Seed& s, std::size_t k) {
  const std::size_t n = s.rank();
  if (k >= n) throw std::out_of_range("mutation direction out of range");
  const std::size_t arity = s.cluster[k].arity();
  LaurentPoly out_product = LaurentPoly::constant(arity, 1);
  LaurentPoly in_product = LaurentPoly::constant(arity, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const int b = s.quiver(k, j);
    if (b > 0) out_product = out_product * pow(s.cluster[j], b);
    if (b < 0) in_product = in_product * pow(s.cluster[j], -b);
  }
  return out_product + in_product;
}

Seed mutate_seed(const Seed& s, std::size_t k) {
  if (s.quiver.size() != s.rank()) {
    throw std::invalid_argument("seed quiver and cluster sizes differ");
  }
  const LaurentPoly numerator = exchange_numerator(s, k);
  auto quotient = try_div_exact(numerator, s.cluster[k]);
  if (!quotient) {
    throw ExactDivisionFailed("exchange numerator " + to_string(numerator) +
                              " not divisible by " + to_string(s.cluster[k]));
  }
  Seed out{mutate(s.quiver, k), s.cluster};
  out.cluster[k] = std::move(*quotient);
  return out;
}

Seed canonical_seed(const Seed& s) {
  const std::size_t n = s.rank();
  Permutation order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return s.cluster[a] < s.cluster[b];
  });
  Permutation perm(n);
  for (std::size_t t = 0; t < n; ++t) perm[order[t]] = t;
  Seed out{permuted(s.quiver, perm), {}};
  out.cluster.reserve(n);
  for (std::size_t t = 0; t < n; ++t) out.cluster.push_back(s.cluster[order[t]]);
  return out;
}

std::size_t ExchangeGraph::degree(std::size_t i) const {
  const auto& slots = adjacency_.at(i);
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(),
                    [](const auto& slot) { return slot.has_value(); }));
}

std::vector<ExchangeEdge> ExchangeGraph::edges() const {
  std::vector<ExchangeEdge> out;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    for (std::size_t k = 0; k < adjacency_[i].size(); ++k) {
      if (adjacency_[i][k]) out.push_back({i, k, *adjacency_[i][k]});
    }
  }
  return out;
}

std::optional<std::size_t> ExchangeGraph::find(
    std::vector<LaurentPoly> cluster) const {
  std::sort(cluster.begin(), cluster.end());
  if (auto it = index_.find(cluster); it != index_.end()) return it->second;
  return std::nullopt;
}

std::set<LaurentPoly> ExchangeGraph::variables() const {
  std::set<LaurentPoly> out;
  for (const auto& s : nodes_) out.insert(s.cluster.begin(), s.cluster.end());
  return out;
}

ExchangeGraph exchange_graph(const Seed& start, int depth,
                             std::size_t node_limit) {
  if (depth < 0) throw std::invalid_argument("depth must be non-negative");
  ExchangeGraph g;
  g.depth_bound_ = depth;
  const std::size_t n = start.rank();

  auto add_node = [&](Seed s, int d) {
    if (g.nodes_.size() >= node_limit) {
      throw LimitExceeded("exchange graph exceeds " +
                          std::to_string(node_limit) + " nodes");
    }
    const std::size_t id = g.nodes_.size();
    g.index_.emplace(s.cluster, id);
    g.nodes_.push_back(std::move(s));
    g.depth_.push_back(d);
    g.adjacency_.emplace_back(n);
    return id;
  };

  add_node(canonical_seed(start), 0);
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop_front();
    if (g.depth_[u] >= depth) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (g.adjacency_[u][k]) continue;
      Seed next = canonical_seed(mutate_seed(g.nodes_[u], k));
      const LaurentPoly& fresh = [&]() -> const LaurentPoly& {
        // the exchanged-in variable is the one not present in u
        for (const auto& v : next.cluster) {
          if (!std::binary_search(g.nodes_[u].cluster.begin(),
                                  g.nodes_[u].cluster.end(), v)) {
            return v;
          }
        }
        throw std::logic_error("mutation did not change the cluster");
      }();
      const std::size_t back = static_cast<std::size_t>(
          std::lower_bound(next.cluster.begin(), next.cluster.end(), fresh) -
          next.cluster.begin());
      std::size_t v;
      if (auto it = g.index_.find(next.cluster); it != g.index_.end()) {
        v = it->second;
      } else {
        v = add_node(std::move(next), g.depth_[u] + 1);
        frontier.push_back(v);
      }
      g.adjacency_[u][k] = v;
      g.adjacency_[v][back] = u;
    }
  }
  return g;
}

std::set<LaurentPoly> variables_up_to_depth(const Seed& start, int depth,
                                            std::size_t node_limit) {
  return exchange_graph(start, depth, node_limit).variables();
}

DenominatorVector denominator_vector(const LaurentPoly& v) {
  return reduced_form(v).denominator;
}

LaurentPoly jacobian_determinant(std::span<const LaurentPoly> vs) {
  const std::size_t n = vs.size();
  for (const auto& v : vs) {
    if (v.arity() != n) {
      throw ArityMismatch("Jacobian needs as many polynomials as variables");
    }
  }
  if (n == 0) return LaurentPoly::constant(0, 1);
  if (n > 20) throw std::invalid_argument("Jacobian too large");

  std::vector<std::vector<LaurentPoly>> jac(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      jac[i].push_back(partial_derivative(vs[i], j));
    }
  }

  // Laplace expansion along rows; minors memoised by their column set.
  std::unordered_map<unsigned, LaurentPoly> minors;
  minors.emplace(0u, LaurentPoly::constant(n, 1));
  auto minor = [&](auto&& self, unsigned columns) -> const LaurentPoly& {
    if (auto it = minors.find(columns); it != minors.end()) return it->second;
    const std::size_t row = n - static_cast<std::size_t>(__builtin_popcount(columns));
    LaurentPoly det(n);
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(columns & (1u << j))) continue;
      if (!jac[row][j].is_zero()) {
        LaurentPoly term = jac[row][j] * self(self, columns & ~(1u << j));
        det = sign > 0 ? det + term : det - term;
      }
      sign = -sign;
    }
    return minors.emplace(columns, std::move(det)).first->second;
  };
  return minor(minor, (1u << n) - 1u);
}

bool is_algebraically_independent(std::span<const LaurentPoly> vs) {
  return !jacobian_determinant(vs).is_zero();
}

PositivityReport positivity_audit(const Seed& start, int depth,
                                  std::size_t node_limit) {
  PositivityReport report;
  for (const auto& v : variables_up_to_depth(start, depth, node_limit)) {
    ++report.checked;
    if (!has_nonneg_numerator(v)) report.violations.push_back(v);
  }
  return report;
}

namespace {

// Index of the coordinate variable v is, if it is one.
std::optional<std::size_t> coordinate_index(const LaurentPoly& v) {
  if (!v.is_monomial() || v.leading_term().coeff != 1) return std::nullopt;
  std::optional<std::size_t> found;
  const auto& e = v.leading_term().exponents;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (e[i] != 1 || found) return std::nullopt;
    found = i;
  }
  return found;
}

}  // namespace

Quiver infer_exchange_quiver(std::span<const LaurentPoly> z,
                             const std::set<LaurentPoly>& pool) {
  const std::size_t n = z.size();
  std::vector<std::size_t> frame_index(n);
  std::vector<std::size_t> z_of_frame(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto idx = coordinate_index(z[i]);
    if (!idx || z[i].arity() != n || z_of_frame[*idx] != n) {
      throw std::invalid_argument(
          "infer_exchange_quiver: z must be the frame's coordinate cluster");
    }
    frame_index[i] = *idx;
    z_of_frame[*idx] = i;
  }

  // rows[i][j]: signed multiplicity of z_j in the exchange binomial of z_i,
  // with the leading monomial counted positively.
  std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    DenominatorVector unit(n, 0);
    unit[frame_index[i]] = 1;
    const LaurentPoly* partner = nullptr;
    for (const auto& v : pool) {
      if (v.arity() != n || v.is_zero()) continue;
      if (denominator_vector(v) != unit) continue;
      if (partner) {
        throw AmbiguousPartner("two pool variables have denominator z" +
                               std::to_string(i + 1));
      }
      partner = &v;
    }
    if (!partner) {
      throw NoPartnerFound("no pool variable has denominator z" +
                           std::to_string(i + 1));
    }
    const LaurentPoly binomial = *partner * z[i];
    if (binomial.size() != 2) {
      throw NotTwoMonomials("exchange numerator of z" + std::to_string(i + 1) +
                            " is " + to_string(binomial));
    }
    for (std::size_t t = 0; t < 2; ++t) {
      const auto& term = binomial.terms()[t];
      if (term.coeff != 1 || term.exponents[frame_index[i]] != 0) {
        throw NotTwoMonomials("exchange numerator of z" + std::to_string(i + 1) +
                              " is " + to_string(binomial));
      }
      for (std::size_t f = 0; f < n; ++f) {
        const int e = term.exponents[f];
        if (e < 0) {
          throw NotTwoMonomials("exchange numerator is not a polynomial");
        }
        rows[i][z_of_frame[f]] += t == 1 ? e : -e;
      }
    }
  }

  // Choose one orientation sign per point so the rows assemble into a
  // skew-symmetric matrix; fixed by propagation from the lowest point of each
  // connected component.
  std::vector<int> sign(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (sign[start] != 0) continue;
    sign[start] = 1;
    std::vector<std::size_t> stack{start};
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (rows[i][j] == 0) continue;
        if (std::abs(rows[j][i]) != std::abs(rows[i][j])) {
          throw InconsistentOrientation("exchange binomials of z" +
                                        std::to_string(i + 1) + " and z" +
                                        std::to_string(j + 1) + " disagree");
        }
        const int wanted = -sign[i] * rows[i][j] / rows[j][i];
        if (sign[j] == 0) {
          sign[j] = wanted;
          stack.push_back(j);
        } else if (sign[j] != wanted) {
          throw InconsistentOrientation("no global orientation exists");
        }
      }
    }
  }
  std::vector<int> b(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b[i * n + j] = sign[i] * rows[i][j];
  }
  return Quiver::from_matrix(n, std::move(b));
}

namespace {

std::optional<std::vector<LaurentPoly>> image_of(
    std::span<const LaurentPoly> cluster, std::span<const LaurentPoly> images) {
  std::vector<LaurentPoly> out;
  out.reserve(cluster.size());
  for (const auto& v : cluster) {
    auto img = substitute(v, images);
    if (!img) return std::nullopt;
    out.push_back(std::move(*img));
  }
  return out;
}

std::vector<LaurentPoly> sorted(std::vector<LaurentPoly> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

bool check_automorphism_candidate(const Seed& start,
                                  std::span<const LaurentPoly> images,
                                  int depth, std::size_t node_limit) {
  const std::size_t n = start.rank();
  if (images.size() != n) {
    throw std::invalid_argument("automorphism candidate must map every variable");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (coordinate_index(start.cluster[i]) != i) {
      throw std::invalid_argument(
          "automorphism check needs the coordinate seed of the frame");
    }
  }
  const ExchangeGraph g = exchange_graph(start, depth, node_limit);

  const auto root_image = image_of(start.cluster, images);
  if (!root_image || !g.find(*root_image)) return false;

  for (std::size_t u = 0; u < g.size(); ++u) {
    if (g.depth_of(u) >= depth) continue;
    const Seed& y = g.node(u);
    const auto fy = image_of(y.cluster, images);
    if (!fy) return false;
    const auto target = g.find(*fy);
    if (!target) continue;  // image lies beyond the explored radius
    const Seed& image_seed = g.node(*target);
    for (std::size_t k = 0; k < n; ++k) {
      const auto lhs = image_of(mutate_seed(y, k).cluster, images);
      if (!lhs) return false;
      const auto pos = std::find(image_seed.cluster.begin(),
                                 image_seed.cluster.end(), (*fy)[k]);
      const std::size_t dir =
          static_cast<std::size_t>(pos - image_seed.cluster.begin());
      const Seed rhs = mutate_seed(image_seed, dir);
      if (sorted(*lhs) != sorted(rhs.cluster)) return false;
    }
  }
  return true;
}

}  // namespace clusterlab
