#pragma once

// Small expression language for external potentials V(x, y) with symbolic
// gradients. Grammar: numbers, x, y, pi, sin(), cos(), + - * / ^, parentheses.

#include "ridk/common.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <string>

namespace ridk {

class Expr {
 public:
  enum class Op { constant, var_x, var_y, add, sub, mul, div, pow, neg, sin, cos, log };

  static std::shared_ptr<const Expr> make(Op op, std::shared_ptr<const Expr> a = nullptr,
                                          std::shared_ptr<const Expr> b = nullptr, double value = 0.0) {
    auto e = std::make_shared<Expr>();
    e->op_ = op;
    e->a_ = std::move(a);
    e->b_ = std::move(b);
    e->value_ = value;
    return e;
  }
  static std::shared_ptr<const Expr> constant(double v) { return make(Op::constant, nullptr, nullptr, v); }

  double eval(double x, double y) const {
    switch (op_) {
      case Op::constant: return value_;
      case Op::var_x: return x;
      case Op::var_y: return y;
      case Op::add: return a_->eval(x, y) + b_->eval(x, y);
      case Op::sub: return a_->eval(x, y) - b_->eval(x, y);
      case Op::mul: return a_->eval(x, y) * b_->eval(x, y);
      case Op::div: return a_->eval(x, y) / b_->eval(x, y);
      case Op::pow: return std::pow(a_->eval(x, y), b_->eval(x, y));
      case Op::neg: return -a_->eval(x, y);
      case Op::sin: return std::sin(a_->eval(x, y));
      case Op::cos: return std::cos(a_->eval(x, y));
      case Op::log: return std::log(a_->eval(x, y));
    }
    return 0.0;
  }

  bool is_constant() const {
    if (op_ == Op::var_x || op_ == Op::var_y) return false;
    return (!a_ || a_->is_constant()) && (!b_ || b_->is_constant());
  }

  /// Symbolic partial derivative with respect to x (var = 0) or y (var = 1).
  static std::shared_ptr<const Expr> derivative(const std::shared_ptr<const Expr>& e, int var) {
    using P = std::shared_ptr<const Expr>;
    const P zero = constant(0.0);
    if (e->is_constant()) return zero;
    const P& a = e->a_;
    const P& b = e->b_;
    switch (e->op_) {
      case Op::constant: return zero;
      case Op::var_x: return constant(var == 0 ? 1.0 : 0.0);
      case Op::var_y: return constant(var == 1 ? 1.0 : 0.0);
      case Op::add: return make(Op::add, derivative(a, var), derivative(b, var));
      case Op::sub: return make(Op::sub, derivative(a, var), derivative(b, var));
      case Op::mul:
        return make(Op::add, make(Op::mul, derivative(a, var), b), make(Op::mul, a, derivative(b, var)));
      case Op::div:
        return make(Op::div, make(Op::sub, make(Op::mul, derivative(a, var), b), make(Op::mul, a, derivative(b, var))),
                    make(Op::mul, b, b));
      case Op::pow:
        if (b->is_constant()) {
          return make(Op::mul, make(Op::mul, b, make(Op::pow, a, make(Op::sub, b, constant(1.0)))),
                      derivative(a, var));
        }
        return make(Op::mul, e,
                    make(Op::add, make(Op::mul, derivative(b, var), make(Op::log, a)),
                         make(Op::div, make(Op::mul, b, derivative(a, var)), a)));
      case Op::neg: return make(Op::neg, derivative(a, var));
      case Op::sin: return make(Op::mul, make(Op::cos, a), derivative(a, var));
      case Op::cos: return make(Op::neg, make(Op::mul, make(Op::sin, a), derivative(a, var)));
      case Op::log: return make(Op::div, derivative(a, var), a);
    }
    return zero;
  }

 private:
  Op op_ = Op::constant;
  std::shared_ptr<const Expr> a_, b_;
  double value_ = 0.0;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  std::shared_ptr<const Expr> parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  using P = std::shared_ptr<const Expr>;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("potential expression: " + what + " at column " + std::to_string(pos_ + 1));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  P expr() {
    P lhs = term();
    for (;;) {
      if (accept('+')) lhs = Expr::make(Expr::Op::add, lhs, term());
      else if (accept('-')) lhs = Expr::make(Expr::Op::sub, lhs, term());
      else return lhs;
    }
  }
  P term() {
    P lhs = unary();
    for (;;) {
      if (accept('*')) lhs = Expr::make(Expr::Op::mul, lhs, unary());
      else if (accept('/')) lhs = Expr::make(Expr::Op::div, lhs, unary());
      else return lhs;
    }
  }
  P unary() {
    if (accept('-')) return Expr::make(Expr::Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  P power() {
    P base = primary();
    if (accept('^')) return Expr::make(Expr::Op::pow, base, unary());
    return base;
  }
  P primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      P e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return Expr::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x") return Expr::make(Expr::Op::var_x);
      if (name == "y") return Expr::make(Expr::Op::var_y);
      if (name == "pi") return Expr::constant(kPi);
      if (name == "sin" || name == "cos") {
        if (!accept('(')) fail("expected '(' after " + name);
        P arg = expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::make(name == "sin" ? Expr::Op::sin : Expr::Op::cos, arg);
      }
      pos_ -= name.size();
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// V with its gradient, both evaluable at points of the torus.
class Potential {
 public:
  Potential() : Potential("0") {}
  explicit Potential(std::string text) : text_(std::move(text)) {
    v_ = detail::ExprParser(text_).parse();
    dx_ = Expr::derivative(v_, 0);
    dy_ = Expr::derivative(v_, 1);
    zero_ = v_->is_constant();
  }
  const std::string& text() const { return text_; }
  bool is_zero_gradient() const { return zero_; }
  double value(const Vec& p) const { return v_->eval(p[0], p[1]); }
  Vec gradient(const Vec& p) const { return Vec(dx_->eval(p[0], p[1]), dy_->eval(p[0], p[1])); }

 private:
  std::string text_;
  std::shared_ptr<const Expr> v_, dx_, dy_;
  bool zero_ = true;
};

}  // namespace ridk
