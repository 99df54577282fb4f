#include "anisolve/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "anisolve/error.hpp"
#include "anisolve/text.hpp"

namespace anisolve {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  int variable = 0;
  std::string function;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const std::array<double, 2>& x) const {
    switch (kind) {
      case Kind::Number:
        return value;
      case Kind::Variable:
        return x[variable];
      case Kind::Negate:
        return -args[0]->eval(x);
      case Kind::Add:
        return args[0]->eval(x) + args[1]->eval(x);
      case Kind::Sub:
        return args[0]->eval(x) - args[1]->eval(x);
      case Kind::Mul:
        return args[0]->eval(x) * args[1]->eval(x);
      case Kind::Div:
        return args[0]->eval(x) / args[1]->eval(x);
      case Kind::Pow:
        return std::pow(args[0]->eval(x), args[1]->eval(x));
      case Kind::Call:
        break;
    }
    const double a = args[0]->eval(x);
    if (function == "sin") return std::sin(a);
    if (function == "cos") return std::cos(a);
    if (function == "tan") return std::tan(a);
    if (function == "exp") return std::exp(a);
    if (function == "log") return std::log(a);
    if (function == "sqrt") return std::sqrt(a);
    if (function == "abs") return std::abs(a);
    if (function == "min") return std::min(a, args[1]->eval(x));
    return std::max(a, args[1]->eval(x));  // "max", checked at parse time
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("expression '" + std::string(src_) + "' column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+'))
        lhs = binary(Kind::Add, lhs, term());
      else if (accept('-'))
        lhs = binary(Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = binary(Kind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = binary(Kind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Negate;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    const auto v = text::parse_double(src_.substr(start, pos_ - start));
    if (!v) fail("malformed number");
    auto n = std::make_shared<Expression::Node>();
    n->value = *v;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string id(src_.substr(start, pos_ - start));
    auto n = std::make_shared<Expression::Node>();
    if (accept('(')) {
      n->kind = Kind::Call;
      n->function = id;
      n->args.push_back(expr());
      while (accept(',')) n->args.push_back(expr());
      if (!accept(')')) fail("expected ')' after arguments of " + id);
      const bool unary_fn = id == "sin" || id == "cos" || id == "tan" || id == "exp" || id == "log" ||
                            id == "sqrt" || id == "abs";
      const bool binary_fn = id == "min" || id == "max";
      if (!unary_fn && !binary_fn) fail("unknown function '" + id + "'");
      if (n->args.size() != (unary_fn ? 1u : 2u)) fail("wrong number of arguments to " + id);
      return n;
    }
    if (id == "x" || id == "x1") {
      n->kind = Kind::Variable;
      n->variable = 0;
    } else if (id == "y" || id == "x2") {
      n->kind = Kind::Variable;
      n->variable = 1;
    } else if (id == "pi") {
      n->value = std::numbers::pi;
    } else if (id == "e") {
      n->value = std::numbers::e;
    } else {
      fail("unknown name '" + id + "'");
    }
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view source) {
  Expression e;
  e.root_ = Parser(source).parse();
  e.source_ = std::string(text::trim(source));
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  auto n = std::make_shared<Node>();
  n->value = value;
  e.root_ = n;
  e.source_ = text::format_double(value);
  return e;
}

double Expression::operator()(std::array<double, 2> x) const { return root_->eval(x); }

bool Expression::is_zero_literal() const noexcept { return root_->kind == Node::Kind::Number && root_->value == 0.0; }

}  // namespace anisolve
