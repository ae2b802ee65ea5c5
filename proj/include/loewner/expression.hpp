#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "loewner/errors.hpp"
#include "loewner/registry.hpp"
#include "loewner/scalar_function.hpp"

namespace loewner {

/**
 * @brief Infix expression in the variable t.
 *
 * Grammar (recursive descent, no implicit multiplication):
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := '-' unary | power
 *     power   := primary ('^' unary)?        right-associative
 *     primary := number | 't' | func '(' expr ')' | '(' expr ')'
 *     func    := sqrt | log | exp | abs
 */
class Expression {
 public:
  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    NodePtr root = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return Expression(std::string(text), std::move(root));
  }

  double operator()(double t) const { return root_->eval(t); }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt, Log, Exp, Abs };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double t) const {
      switch (kind) {
        case Kind::Const: return value;
        case Kind::Var: return t;
        case Kind::Neg: return -lhs->eval(t);
        case Kind::Add: return lhs->eval(t) + rhs->eval(t);
        case Kind::Sub: return lhs->eval(t) - rhs->eval(t);
        case Kind::Mul: return lhs->eval(t) * rhs->eval(t);
        case Kind::Div: return lhs->eval(t) / rhs->eval(t);
        case Kind::Pow: return std::pow(lhs->eval(t), rhs->eval(t));
        case Kind::Sqrt: return std::sqrt(lhs->eval(t));
        case Kind::Log: return std::log(lhs->eval(t));
        case Kind::Exp: return std::exp(lhs->eval(t));
        case Kind::Abs: return std::abs(lhs->eval(t));
      }
      return std::nan("");
    }
  };
  using NodePtr = std::shared_ptr<const Node>;
  using Kind = Node::Kind;

  static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    return std::make_shared<const Node>(Node{k, v, std::move(a), std::move(b)});
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw InvalidArgument("expression '" + std::string(s) + "': " + msg + " at offset " +
                            std::to_string(pos));
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expr() {
      NodePtr n = term();
      while (true) {
        if (accept('+')) n = make(Kind::Add, n, term());
        else if (accept('-')) n = make(Kind::Sub, n, term());
        else return n;
      }
    }
    NodePtr term() {
      NodePtr n = unary();
      while (true) {
        if (accept('*')) n = make(Kind::Mul, n, unary());
        else if (accept('/')) n = make(Kind::Div, n, unary());
        else return n;
      }
    }
    NodePtr unary() {
      if (accept('-')) return make(Kind::Neg, unary());
      return power();
    }
    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return make(Kind::Pow, base, unary());
      return base;
    }
    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        std::string_view word = s.substr(start, pos - start);
        if (word == "t") return make(Kind::Var);
        Kind k;
        if (word == "sqrt") k = Kind::Sqrt;
        else if (word == "log") k = Kind::Log;
        else if (word == "exp") k = Kind::Exp;
        else if (word == "abs") k = Kind::Abs;
        else {
          pos = start;
          fail("unknown identifier '" + std::string(word) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(k, arg);
      }
      if (accept('(')) {
        NodePtr n = expr();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    NodePtr number() {
      std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
        ++pos;
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t save = pos++;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        } else {
          pos = save;
        }
      }
      std::string lit(s.substr(start, pos - start));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(lit, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != lit.size() || lit.empty()) {
        pos = start;
        fail("malformed number '" + lit + "'");
      }
      return make(Kind::Const, nullptr, nullptr, v);
    }
  };

  Expression(std::string text, NodePtr root) : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  NodePtr root_;
};

/**
 * Resolves a function specification: a registry name (whose own domain is
 * kept) or an infix expression in t on `domain`. The result must evaluate to
 * a finite number at the midpoint of its domain.
 */
inline ScalarFunction parse_function(std::string_view spec,
                                     const Interval& domain = Interval::real_line()) {
  std::optional<ScalarFunction> f = registry_function(spec);
  if (!f) {
    Expression e = Expression::parse(spec);
    f.emplace(std::string(spec), domain, [e](double t) { return e(t); });
  }
  double mid = f->domain().midpoint();
  double v = 0.0;
  try {
    v = (*f)(mid);
  } catch (const DomainViolation&) {
    v = std::nan("");
  }
  if (!std::isfinite(v))
    throw InvalidArgument("function '" + std::string(spec) + "' is not finite at the domain midpoint " +
                          std::to_string(mid));
  return *f;
}

}  // namespace loewner
