#pragma once
// Coefficient expressions in chart coordinates, e.g. "1 + 0.5*cos(x)*cos(y)".
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | primary
//   primary := number | 'x' | 'y' | 't' | 'pi' | ('cos' | 'sin') '(' expr ')' | '(' expr ')'
//
// 't' is an alias of 'x' so warp profiles read naturally.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>

#include "kgmp/common.hpp"

namespace kgmp {

class Expression {
 public:
  Expression() : Expression("0") {}
  explicit Expression(std::string text) : text_(std::move(text)) {
    pos_ = 0;
    root_ = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  double operator()(double x, double y = 0.0) const { return root_->eval(x, y); }
  double operator()(const Point2& p) const { return root_->eval(p[0], p[1]); }
  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum Op { num, var_x, var_y, add, sub, mul, div, neg, cos, sin } op = num;
    double value = 0.0;
    std::shared_ptr<const Node> l, r;
    double eval(double x, double y) const {
      switch (op) {
        case num: return value;
        case var_x: return x;
        case var_y: return y;
        case add: return l->eval(x, y) + r->eval(x, y);
        case sub: return l->eval(x, y) - r->eval(x, y);
        case mul: return l->eval(x, y) * r->eval(x, y);
        case div: return l->eval(x, y) / r->eval(x, y);
        case neg: return -l->eval(x, y);
        case cos: return std::cos(l->eval(x, y));
        case sin: return std::sin(l->eval(x, y));
      }
      return 0.0;
    }
  };
  using Ptr = std::shared_ptr<const Node>;

  static Ptr make(Node::Op op, Ptr l = nullptr, Ptr r = nullptr, double v = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->l = std::move(l);
    n->r = std::move(r);
    n->value = v;
    return n;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression \"" + text_ + "\" at column " + std::to_string(pos_ + 1) + ": " + why);
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Ptr parse_expr() {
    Ptr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = make(Node::add, lhs, parse_term());
      else if (accept('-')) lhs = make(Node::sub, lhs, parse_term());
      else return lhs;
    }
  }
  Ptr parse_term() {
    Ptr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::mul, lhs, parse_unary());
      else if (accept('/')) lhs = make(Node::div, lhs, parse_unary());
      else return lhs;
    }
  }
  Ptr parse_unary() {
    if (accept('-')) return make(Node::neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_primary();
  }
  Ptr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Ptr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Node::num, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string word = text_.substr(pos_, end - pos_);
      pos_ = end;
      if (word == "x" || word == "t") return make(Node::var_x);
      if (word == "y") return make(Node::var_y);
      if (word == "pi") return make(Node::num, nullptr, nullptr, pi);
      if (word == "cos" || word == "sin") {
        if (!accept('(')) fail("expected '(' after " + word);
        Ptr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return make(word == "cos" ? Node::cos : Node::sin, arg);
      }
      fail("unknown identifier '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  Ptr root_;
};

}  // namespace kgmp
