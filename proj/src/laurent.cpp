#include "clusterlab/laurent.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace clusterlab {

namespace {

struct ExponentHash {
  std::size_t operator()(const ExponentVector& e) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : e) {
      h ^= static_cast<std::size_t>(static_cast<unsigned>(v)) + 0x9e3779b97f4a7c15ULL +
           (h << 6) + (h >> 2);
    }
    return h;
  }
};

using Accumulator =
    std::unordered_map<ExponentVector, Coefficient, ExponentHash>;

void require_same_arity(const LaurentPoly& a, const LaurentPoly& b,
                        const char* op) {
  if (a.arity() != b.arity()) {
    throw ArityMismatch(std::string(op) + ": arity " +
                        std::to_string(a.arity()) + " vs " +
                        std::to_string(b.arity()));
  }
}

ExponentVector add_exponents(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

LaurentPoly from_accumulator(std::size_t arity, Accumulator&& acc) {
  std::vector<LaurentPoly::Term> terms;
  terms.reserve(acc.size());
  for (auto& [e, c] : acc) {
    if (c != 0) terms.push_back({e, std::move(c)});
  }
  return LaurentPoly::from_terms(arity, std::move(terms));
}

LaurentPoly shifted(const LaurentPoly& a, const ExponentVector& shift) {
  std::vector<LaurentPoly::Term> terms;
  terms.reserve(a.size());
  for (const auto& t : a.terms()) {
    terms.push_back({add_exponents(t.exponents, shift), t.coeff});
  }
  return LaurentPoly::from_terms(a.arity(), std::move(terms));
}

ExponentVector min_exponents(const LaurentPoly& a) {
  ExponentVector m(a.arity(), 0);
  bool first = true;
  for (const auto& t : a.terms()) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = first ? t.exponents[i] : std::min(m[i], t.exponents[i]);
    }
    first = false;
  }
  return m;
}

ExponentVector negated(ExponentVector e) {
  for (int& v : e) v = -v;
  return e;
}

}  // namespace

LaurentPoly LaurentPoly::constant(std::size_t arity, const Coefficient& c) {
  LaurentPoly p(arity);
  if (c != 0) p.terms_.push_back({ExponentVector(arity, 0), c});
  return p;
}

LaurentPoly LaurentPoly::variable(std::size_t arity, std::size_t index) {
  if (index >= arity) throw std::out_of_range("variable index out of range");
  ExponentVector e(arity, 0);
  e[index] = 1;
  return monomial(std::move(e));
}

LaurentPoly LaurentPoly::monomial(ExponentVector exponents,
                                  const Coefficient& c) {
  LaurentPoly p(exponents.size());
  if (c != 0) p.terms_.push_back({std::move(exponents), c});
  return p;
}

LaurentPoly LaurentPoly::from_terms(std::size_t arity,
                                    std::vector<Term> terms) {
  for (const auto& t : terms) {
    if (t.exponents.size() != arity) {
      throw ArityMismatch("term exponent vector has wrong arity");
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.exponents < y.exponents; });
  LaurentPoly p(arity);
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().exponents == t.exponents) {
      p.terms_.back().coeff += t.coeff;
    } else {
      p.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(p.terms_, [](const Term& t) { return t.coeff == 0; });
  return p;
}

bool LaurentPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() != 1) return false;
  return std::all_of(terms_[0].exponents.begin(), terms_[0].exponents.end(),
                     [](int e) { return e == 0; });
}

const LaurentPoly::Term& LaurentPoly::leading_term() const {
  if (terms_.empty()) throw std::domain_error("leading term of zero");
  return terms_.back();
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly p = *this;
  for (auto& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& other) {
  require_same_arity(*this, other, "add");
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto i = terms_.begin();
  auto j = other.terms_.begin();
  while (i != terms_.end() || j != other.terms_.end()) {
    if (j == other.terms_.end() ||
        (i != terms_.end() && i->exponents < j->exponents)) {
      merged.push_back(std::move(*i++));
    } else if (i == terms_.end() || j->exponents < i->exponents) {
      merged.push_back(*j++);
    } else {
      Coefficient c = i->coeff + j->coeff;
      if (c != 0) merged.push_back({std::move(i->exponents), std::move(c)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& other) {
  return *this += -other;
}

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& other) {
  *this = mul(*this, other);
  return *this;
}

std::strong_ordering LaurentPoly::operator<=>(const LaurentPoly& other) const {
  if (auto c = arity_ <=> other.arity_; c != 0) return c;
  const std::size_t n = std::min(terms_.size(), other.terms_.size());
  for (std::size_t k = 0; k < n; ++k) {
    const Term& x = terms_[k];
    const Term& y = other.terms_[k];
    if (auto c = x.exponents <=> y.exponents; c != 0) return c;
    const int cc = cmp(x.coeff, y.coeff);
    if (cc != 0) return cc < 0 ? std::strong_ordering::less
                               : std::strong_ordering::greater;
  }
  return terms_.size() <=> other.terms_.size();
}

std::size_t LaurentPoly::hash() const {
  std::size_t h = arity_;
  ExponentHash eh;
  for (const auto& t : terms_) {
    h = h * 1000003u ^ eh(t.exponents);
    h = h * 1000003u ^ (static_cast<std::size_t>(mpz_get_ui(t.coeff.get_mpz_t())) +
                        static_cast<std::size_t>(sgn(t.coeff) + 1));
  }
  return h;
}

LaurentPoly add(const LaurentPoly& a, const LaurentPoly& b) { return a + b; }
LaurentPoly sub(const LaurentPoly& a, const LaurentPoly& b) { return a - b; }

LaurentPoly mul(const LaurentPoly& a, const LaurentPoly& b) {
  require_same_arity(a, b, "mul");
  if (a.is_zero() || b.is_zero()) return LaurentPoly(a.arity());
  if (b.is_monomial()) {
    const auto& m = b.leading_term();
    std::vector<LaurentPoly::Term> terms;
    terms.reserve(a.size());
    for (const auto& t : a.terms()) {
      terms.push_back({add_exponents(t.exponents, m.exponents), t.coeff * m.coeff});
    }
    return LaurentPoly::from_terms(a.arity(), std::move(terms));
  }
  if (a.is_monomial()) return mul(b, a);
  Accumulator acc;
  acc.reserve(std::min<std::size_t>(a.size() * b.size(), 4 * (a.size() + b.size())));
  ExponentVector scratch(a.arity());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      for (std::size_t i = 0; i < scratch.size(); ++i) {
        scratch[i] = ta.exponents[i] + tb.exponents[i];
      }
      auto it = acc.find(scratch);
      if (it == acc.end()) {
        acc.emplace(scratch, ta.coeff * tb.coeff);
      } else {
        mpz_addmul(it->second.get_mpz_t(), ta.coeff.get_mpz_t(), tb.coeff.get_mpz_t());
      }
    }
  }
  return from_accumulator(a.arity(), std::move(acc));
}

LaurentPoly pow(const LaurentPoly& a, unsigned exponent) {
  LaurentPoly result = LaurentPoly::constant(a.arity(), 1);
  LaurentPoly base = a;
  while (exponent > 0) {
    if (exponent & 1u) result = mul(result, base);
    exponent >>= 1;
    if (exponent > 0) base = mul(base, base);
  }
  return result;
}

std::optional<LaurentPoly> try_div_exact(const LaurentPoly& a,
                                         const LaurentPoly& b) {
  require_same_arity(a, b, "try_div_exact");
  if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
  if (a.is_zero()) return LaurentPoly(a.arity());

  if (b.is_monomial()) {
    const auto& lt = b.leading_term();
    std::vector<LaurentPoly::Term> terms;
    terms.reserve(a.size());
    for (const auto& t : a.terms()) {
      if (!mpz_divisible_p(t.coeff.get_mpz_t(), lt.coeff.get_mpz_t())) {
        return std::nullopt;
      }
      ExponentVector e(t.exponents.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = t.exponents[i] - lt.exponents[i];
      }
      terms.push_back({std::move(e), Coefficient(t.coeff / lt.coeff)});
    }
    return LaurentPoly::from_terms(a.arity(), std::move(terms));
  }

  // Clear monomial content so both sides are polynomials and the divisor has
  // no variable factor; then leading-term reduction in Z[x] under lex order.
  const ExponentVector a_min = min_exponents(a);
  const ExponentVector b_min = min_exponents(b);
  const LaurentPoly divisor = shifted(b, negated(b_min));
  const auto& lead = divisor.leading_term();

  std::map<ExponentVector, Coefficient, std::greater<>> remainder;
  for (const auto& t : a.terms()) {
    ExponentVector e(t.exponents.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = t.exponents[i] - a_min[i];
    remainder.emplace(std::move(e), t.coeff);
  }

  std::vector<LaurentPoly::Term> quotient;
  while (!remainder.empty()) {
    const auto& [re, rc] = *remainder.begin();
    ExponentVector qe(re.size());
    for (std::size_t i = 0; i < qe.size(); ++i) {
      qe[i] = re[i] - lead.exponents[i];
      if (qe[i] < 0) return std::nullopt;
    }
    if (!mpz_divisible_p(rc.get_mpz_t(), lead.coeff.get_mpz_t())) {
      return std::nullopt;
    }
    Coefficient qc = rc / lead.coeff;
    for (const auto& t : divisor.terms()) {
      auto key = add_exponents(qe, t.exponents);
      auto it = remainder.find(key);
      Coefficient delta = qc * t.coeff;
      if (it == remainder.end()) {
        remainder.emplace(std::move(key), -delta);
      } else {
        it->second -= delta;
        if (it->second == 0) remainder.erase(it);
      }
    }
    quotient.push_back({std::move(qe), std::move(qc)});
  }

  ExponentVector shift(a.arity());
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = a_min[i] - b_min[i];
  return shifted(LaurentPoly::from_terms(a.arity(), std::move(quotient)), shift);
}

ReducedForm reduced_form(const LaurentPoly& a) {
  if (a.is_zero()) throw std::domain_error("reduced_form of zero");
  ExponentVector den = negated(min_exponents(a));
  for (int& d : den) d = std::max(d, 0);
  return {shifted(a, den), den};
}

bool has_nonneg_numerator(const LaurentPoly& a) {
  const ReducedForm rf = reduced_form(a);
  return std::all_of(rf.numerator.terms().begin(), rf.numerator.terms().end(),
                     [](const LaurentPoly::Term& t) { return t.coeff > 0; });
}

LaurentPoly partial_derivative(const LaurentPoly& a, std::size_t index) {
  if (index >= a.arity()) {
    throw std::out_of_range("partial_derivative: variable index out of range");
  }
  std::vector<LaurentPoly::Term> terms;
  for (const auto& t : a.terms()) {
    const int k = t.exponents[index];
    if (k == 0) continue;
    ExponentVector e = t.exponents;
    e[index] = k - 1;
    terms.push_back({std::move(e), t.coeff * k});
  }
  return LaurentPoly::from_terms(a.arity(), std::move(terms));
}

std::optional<LaurentPoly> substitute(const LaurentPoly& a,
                                      std::span<const LaurentPoly> images) {
  if (images.size() != a.arity()) {
    throw ArityMismatch("substitute: need one image per variable");
  }
  if (images.empty()) return a;
  const std::size_t target = images.front().arity();
  for (const auto& img : images) {
    if (img.arity() != target) {
      throw ArityMismatch("substitute: images have differing arity");
    }
  }
  if (a.is_zero()) return LaurentPoly(target);

  std::vector<std::vector<LaurentPoly>> powers(images.size());
  auto power = [&](std::size_t i, int k) -> const LaurentPoly& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(LaurentPoly::constant(target, 1));
    while (cache.size() <= static_cast<std::size_t>(k)) {
      cache.push_back(mul(cache.back(), images[i]));
    }
    return cache[k];
  };

  const ReducedForm rf = reduced_form(a);
  LaurentPoly numerator(target);
  for (const auto& t : rf.numerator.terms()) {
    LaurentPoly term = LaurentPoly::constant(target, t.coeff);
    for (std::size_t i = 0; i < t.exponents.size(); ++i) {
      if (t.exponents[i] > 0) term = mul(term, power(i, t.exponents[i]));
    }
    numerator += term;
  }
  LaurentPoly denominator = LaurentPoly::constant(target, 1);
  for (std::size_t i = 0; i < rf.denominator.size(); ++i) {
    if (rf.denominator[i] > 0) {
      denominator = mul(denominator, power(i, rf.denominator[i]));
    }
  }
  if (denominator.is_zero()) return std::nullopt;
  return try_div_exact(numerator, denominator);
}

VariableNames VariableNames::indexed(std::size_t arity, const std::string& stem,
                                     int first) {
  VariableNames v;
  for (std::size_t i = 0; i < arity; ++i) {
    v.names.push_back(stem + std::to_string(first + static_cast<int>(i)));
  }
  return v;
}

std::string to_string(const LaurentPoly& a, const VariableNames& names) {
  if (a.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (auto it = a.terms().rbegin(); it != a.terms().rend(); ++it) {
    Coefficient c = it->coeff;
    if (first) {
      if (c < 0) {
        out << "-";
        c = -c;
      }
    } else {
      out << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    std::vector<std::string> factors;
    for (std::size_t i = 0; i < it->exponents.size(); ++i) {
      const int e = it->exponents[i];
      if (e == 0) continue;
      factors.push_back(e == 1 ? names[i] : names[i] + "^" + std::to_string(e));
    }
    if (factors.empty()) {
      out << c.get_str();
      continue;
    }
    if (c != 1) out << c.get_str() << "*";
    for (std::size_t k = 0; k < factors.size(); ++k) {
      if (k) out << "*";
      out << factors[k];
    }
  }
  return out.str();
}

std::string to_string(const LaurentPoly& a) {
  return to_string(a, VariableNames::indexed(a.arity()));
}

}  // namespace clusterlab
