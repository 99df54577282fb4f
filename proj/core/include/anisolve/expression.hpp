#pragma once

// Arithmetic expressions in the spatial variables, evaluated nodewise.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Variables: x, y (aliases x1, x2).  Constants: pi, e.  Functions: sin, cos,
// tan, exp, log, sqrt, abs, min, max.

#include <array>
#include <memory>
#include <string>
#include <string_view>

namespace anisolve {

class Expression {
 public:
  /// Throws InvalidInput with the offending column on a syntax error.
  static Expression parse(std::string_view source);
  static Expression constant(double value);

  double operator()(std::array<double, 2> x) const;
  const std::string& source() const noexcept { return source_; }
  /// True when the expression is the literal constant 0.
  bool is_zero_literal() const noexcept;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace anisolve
