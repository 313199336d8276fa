#include "clusterlab/quiver.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <cstdlib>
#include <sstream>

namespace clusterlab {

Quiver Quiver::from_matrix(std::size_t n, std::vector<int> entries) {
  if (entries.size() != n * n) {
    throw std::invalid_argument("quiver matrix has wrong size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i * n + i] != 0) throw std::invalid_argument("quiver has a loop");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (entries[i * n + j] != -entries[j * n + i]) {
        throw std::invalid_argument("quiver matrix is not skew-symmetric");
      }
    }
  }
  Quiver q(n);
  q.b_ = std::move(entries);
  return q;
}

Quiver Quiver::from_arrows(std::size_t n, const std::vector<Arrow>& arrows) {
  Quiver q(n);
  for (const auto& [s, t] : arrows) {
    if (s >= n || t >= n) throw std::invalid_argument("arrow endpoint out of range");
    if (s == t) throw std::invalid_argument("quiver has a loop");
    if (q(s, t) < 0) throw std::invalid_argument("arrows form a 2-cycle");
    q.add_arrows(s, t, 1);
  }
  return q;
}

void Quiver::add_arrows(std::size_t i, std::size_t j, int m) {
  if (i == j) {
    if (m != 0) throw std::invalid_argument("quiver has a loop");
    return;
  }
  b_[i * n_ + j] += m;
  b_[j * n_ + i] -= m;
}

std::vector<Arrow> Quiver::arrows() const {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (int m = 0; m < (*this)(i, j); ++m) out.emplace_back(i, j);
    }
  }
  return out;
}

Quiver mutate(const Quiver& q, std::size_t k) {
  const std::size_t n = q.size();
  if (k >= n) throw std::out_of_range("mutation direction out of range");
  std::vector<int> b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == k || j == k) {
        b[i * n + j] = -q(i, j);
        continue;
      }
      const int bik = q(i, k);
      const int bkj = q(k, j);
      // paths i -> k -> j add arrows i -> j; paths j -> k -> i add j -> i
      b[i * n + j] = q(i, j) + (std::abs(bik) * bkj + bik * std::abs(bkj)) / 2;
    }
  }
  return Quiver::from_matrix(n, std::move(b));
}

Quiver opposite(const Quiver& q) {
  std::vector<int> b = q.matrix();
  for (int& v : b) v = -v;
  return Quiver::from_matrix(q.size(), std::move(b));
}

Quiver permuted(const Quiver& q, const Permutation& perm) {
  const std::size_t n = q.size();
  if (perm.size() != n) throw std::invalid_argument("permutation has wrong size");
  std::vector<int> b(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b[perm[i] * n + perm[j]] = q(i, j);
  }
  return Quiver::from_matrix(n, std::move(b));
}

namespace {

// Colour refinement: points are split by an isomorphism-invariant signature
// until the partition is stable.
std::vector<int> refine_colors(const Quiver& q) {
  const std::size_t n = q.size();
  std::vector<int> color(n, 0);
  std::size_t classes = 1;
  while (true) {
    using Signature = std::pair<int, std::vector<std::pair<int, int>>>;
    std::vector<Signature> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      sig[i].first = color[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (q(i, j) != 0) sig[i].second.emplace_back(q(i, j), color[j]);
      }
      std::sort(sig[i].second.begin(), sig[i].second.end());
    }
    std::vector<Signature> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t i = 0; i < n; ++i) {
      color[i] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), sig[i]) -
          distinct.begin());
    }
    if (distinct.size() == classes) break;
    classes = distinct.size();
  }
  return color;
}

class CanonicalSearch {
 public:
  explicit CanonicalSearch(const Quiver& q) : q_(q), n_(q.size()) {
    color_ = refine_colors(q);
    slot_color_ = color_;
    std::sort(slot_color_.begin(), slot_color_.end());
    used_.assign(n_, false);
  }

  Permutation run() {
    order_.clear();
    search(0);
    return best_order_;
  }

 private:
  // The key lists b(v_t, v_s) for s < t: the strict lower triangle read row
  // by row (the upper triangle is its negation). Returns the sign of the
  // comparison between the current key prefix and the best key.
  int compare_with_best() const {
    for (std::size_t i = 0; i < key_.size(); ++i) {
      if (key_[i] != best_key_[i]) return key_[i] < best_key_[i] ? -1 : 1;
    }
    return 0;
  }

  void search(std::size_t t) {
    if (t == n_) {
      if (!have_best_ || compare_with_best() < 0) {
        best_order_ = order_;
        best_key_ = key_;
        have_best_ = true;
      }
      return;
    }
    for (std::size_t v = 0; v < n_; ++v) {
      if (used_[v] || color_[v] != slot_color_[t]) continue;
      const std::size_t before = key_.size();
      for (std::size_t s = 0; s < t; ++s) key_.push_back(q_(v, order_[s]));
      if (!have_best_ || compare_with_best() <= 0) {
        used_[v] = true;
        order_.push_back(v);
        search(t + 1);
        order_.pop_back();
        used_[v] = false;
      }
      key_.resize(before);
    }
  }

  const Quiver& q_;
  std::size_t n_;
  std::vector<int> color_;
  std::vector<int> slot_color_;
  std::vector<bool> used_;
  Permutation order_;
  std::vector<int> key_;
  Permutation best_order_;
  std::vector<int> best_key_;
  bool have_best_ = false;
};

}  // namespace

CanonicalLabeling canonical_labeling(const Quiver& q) {
  if (q.size() == 0) return {q, {}};
  Permutation order = CanonicalSearch(q).run();
  Permutation perm(q.size());
  for (std::size_t t = 0; t < order.size(); ++t) perm[order[t]] = t;
  return {permuted(q, perm), std::move(order)};
}

std::optional<Permutation> find_isomorphism(const Quiver& q, const Quiver& r) {
  if (q.size() != r.size()) return std::nullopt;
  const CanonicalLabeling cq = canonical_labeling(q);
  const CanonicalLabeling cr = canonical_labeling(r);
  if (cq.form != cr.form) return std::nullopt;
  Permutation witness(q.size());
  for (std::size_t t = 0; t < q.size(); ++t) witness[cq.order[t]] = cr.order[t];
  return witness;
}

bool is_connected(const Quiver& q) {
  const std::size_t n = q.size();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && q(i, j) != 0) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

Quiver tilde_A_canonical(int p, int q) {
  if (q < 1 || p < q) {
    throw std::invalid_argument("tilde_A_canonical requires p >= q >= 1");
  }
  const std::size_t n = static_cast<std::size_t>(p + q);
  Quiver out(n);
  if (n == 2) {
    out.add_arrows(0, 1, 2);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (i < static_cast<std::size_t>(p)) {
      out.add_arrows(i, j, 1);
    } else {
      out.add_arrows(j, i, 1);
    }
  }
  return out;
}

std::string to_string(const TypeLabel& t) {
  if (t.kind == TypeLabel::Kind::Other) return "Other";
  return "TildeA(" + std::to_string(t.p) + "," + std::to_string(t.q) + ")";
}

std::set<Quiver> mutation_class(const Quiver& q, std::size_t node_limit) {
  if (node_limit == 0) throw std::invalid_argument("node_limit must be positive");
  std::set<Quiver> seen;
  std::deque<Quiver> frontier;
  Quiver start = canonical_form(q);
  seen.insert(start);
  frontier.push_back(std::move(start));
  while (!frontier.empty()) {
    const Quiver current = std::move(frontier.front());
    frontier.pop_front();
    for (std::size_t k = 0; k < current.size(); ++k) {
      Quiver next = canonical_form(mutate(current, k));
      if (seen.insert(next).second) {
        if (seen.size() > node_limit) {
          throw LimitExceeded("mutation class exceeds " +
                              std::to_string(node_limit) + " quivers");
        }
        frontier.push_back(std::move(next));
      }
    }
  }
  return seen;
}

namespace {

std::shared_ptr<const std::set<Quiver>> cached_tilde_A_class(
    int p, int q, std::size_t node_limit) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::set<Quiver>>>
      cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({p, q}); it != cache.end()) return it->second;
  }
  auto cls = std::make_shared<const std::set<Quiver>>(
      mutation_class(tilde_A_canonical(p, q), node_limit));
  std::lock_guard lock(mutex);
  return cache.emplace(std::make_pair(p, q), std::move(cls)).first->second;
}

}  // namespace

TypeLabel classify_tilde_A(const Quiver& q, std::size_t node_limit) {
  const int n = static_cast<int>(q.size());
  if (n < 2 || !is_connected(q)) return TypeLabel::other();
  const Quiver form = canonical_form(q);
  for (int small = 1; small <= n / 2; ++small) {
    const int large = n - small;
    if (cached_tilde_A_class(large, small, node_limit)->contains(form)) {
      return TypeLabel::tilde_a(large, small);
    }
  }
  return TypeLabel::other();
}

std::string to_dot(const Quiver& q, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "digraph quiver {\n";
  for (std::size_t i = 0; i < q.size(); ++i) {
    out << "  " << i << " [label=\""
        << (i < names.size() ? names[i] : std::to_string(i + 1)) << "\"];\n";
  }
  for (const auto& [s, t] : q.arrows()) out << "  " << s << " -> " << t << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace clusterlab
