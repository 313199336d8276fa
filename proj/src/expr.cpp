#include "clusterlab/expr.hpp"

#include <cctype>

namespace clusterlab {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Macros& macros) : text_(text), macros_(macros) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (i_ != text_.size()) fail("unexpected '" + std::string(1, text_[i_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("cannot parse \"" + std::string(text_) + "\" at " +
                     std::to_string(i_) + ": " + what);
  }

  void skip() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }

  bool peek(char c) {
    skip();
    return i_ < text_.size() && text_[i_] == c;
  }

  bool starts_factor() {
    skip();
    if (i_ >= text_.size()) return false;
    const unsigned char c = static_cast<unsigned char>(text_[i_]);
    return c == '(' || std::isalnum(c) || c == '*';
  }

  Expr sum() {
    Expr out{Expr::Kind::Sum, {}, 0, {}, {}};
    int sign = 1;
    if (peek('-')) {
      ++i_;
      sign = -1;
    }
    while (true) {
      out.signs.push_back(sign);
      out.children.push_back(std::make_shared<const Expr>(product()));
      if (peek('+')) {
        sign = 1;
      } else if (peek('-')) {
        sign = -1;
      } else {
        break;
      }
      ++i_;
    }
    if (out.children.size() == 1 && out.signs[0] == 1) return *out.children[0];
    return out;
  }

  Expr product() {
    Expr out{Expr::Kind::Product, {}, 0, {}, {}};
    out.children.push_back(std::make_shared<const Expr>(power()));
    while (starts_factor()) {
      if (peek('*')) ++i_;
      out.children.push_back(std::make_shared<const Expr>(power()));
    }
    if (out.children.size() == 1) return *out.children[0];
    return out;
  }

  Expr power() {
    Expr base = atom();
    if (!peek('^')) return base;
    ++i_;
    skip();
    const std::size_t start = i_;
    while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
    if (start == i_) fail("expected an exponent");
    Expr out{Expr::Kind::Power, {}, Coefficient(std::string(text_.substr(start, i_ - start))),
             {}, {}};
    out.children.push_back(std::make_shared<const Expr>(std::move(base)));
    return out;
  }

  Expr atom() {
    skip();
    if (i_ >= text_.size()) fail("unexpected end");
    const unsigned char c = static_cast<unsigned char>(text_[i_]);
    if (c == '(') {
      ++i_;
      Expr inner = sum();
      if (!peek(')')) fail("expected ')'");
      ++i_;
      return inner;
    }
    if (std::isdigit(c)) {
      const std::size_t start = i_;
      while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
      return {Expr::Kind::Integer, {}, Coefficient(std::string(text_.substr(start, i_ - start))),
              {}, {}};
    }
    if (std::isalpha(c)) return symbol();
    fail("unexpected '" + std::string(1, text_[i_]) + "'");
  }

  Expr symbol() {
    const std::size_t start = i_;
    while (i_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[i_]))) ++i_;
    while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
    if (i_ < text_.size() && text_[i_] == '{') {
      while (i_ < text_.size() && text_[i_] != '}') ++i_;
      if (i_ == text_.size()) fail("unterminated '{'");
      ++i_;
    }
    while (i_ < text_.size() && text_[i_] == '\'') ++i_;
    std::string name(text_.substr(start, i_ - start));
    if (auto it = macros_.find(name); it != macros_.end()) return it->second;
    return {Expr::Kind::Symbol, std::move(name), 0, {}, {}};
  }

  std::string_view text_;
  const Macros& macros_;
  std::size_t i_ = 0;
};

void collect(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Symbol) out.insert(e.symbol);
  for (const auto& c : e.children) collect(*c, out);
}

std::size_t arity_of(const SymbolEnv& env) {
  if (env.empty()) throw std::invalid_argument("empty symbol environment");
  return env.begin()->second.arity();
}

}  // namespace

Expr parse_expr(std::string_view text, const Macros& macros) {
  return Parser(text, macros).parse();
}

LaurentPoly evaluate(const Expr& e, const SymbolEnv& env) {
  switch (e.kind) {
    case Expr::Kind::Integer:
      return LaurentPoly::constant(arity_of(env), e.value);
    case Expr::Kind::Symbol: {
      auto it = env.find(e.symbol);
      if (it == env.end()) throw UnboundSymbol("unbound symbol " + e.symbol);
      return it->second;
    }
    case Expr::Kind::Power:
      return pow(evaluate(*e.children[0], env), static_cast<unsigned>(e.value.get_ui()));
    case Expr::Kind::Product: {
      LaurentPoly out = LaurentPoly::constant(arity_of(env), 1);
      for (const auto& c : e.children) out *= evaluate(*c, env);
      return out;
    }
    case Expr::Kind::Sum: {
      LaurentPoly out(arity_of(env));
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (e.signs[i] > 0) {
          out += evaluate(*e.children[i], env);
        } else {
          out -= evaluate(*e.children[i], env);
        }
      }
      return out;
    }
  }
  throw std::logic_error("unknown expression kind");
}

std::set<std::string> symbols_of(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

LaurentPoly expand_formally(const Expr& e, const std::vector<std::string>& order) {
  SymbolEnv env;
  for (std::size_t i = 0; i < order.size(); ++i) {
    env.emplace(order[i], LaurentPoly::variable(order.size(), i));
  }
  return evaluate(e, env);
}

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Integer:
      return e.value.get_str();
    case Expr::Kind::Symbol:
      return e.symbol;
    case Expr::Kind::Power:
      if (e.children[0]->kind == Expr::Kind::Symbol || e.children[0]->kind == Expr::Kind::Integer) {
        return to_string(*e.children[0]) + "^" + e.value.get_str();
      }
      return "(" + to_string(*e.children[0]) + ")^" + e.value.get_str();
    case Expr::Kind::Product: {
      std::string out;
      for (const auto& c : e.children) {
        if (!out.empty()) out += "*";
        out += c->kind == Expr::Kind::Sum ? "(" + to_string(*c) + ")" : to_string(*c);
      }
      return out;
    }
    case Expr::Kind::Sum: {
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) out += e.signs[i] > 0 ? " + " : " - ";
        if (i == 0 && e.signs[i] < 0) out += "-";
        out += to_string(*e.children[i]);
      }
      return out;
    }
  }
  return {};
}

}  // namespace clusterlab
