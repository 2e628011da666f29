#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gss/jet.hpp"

namespace gss {

/// Largest number of variables an expression may declare (x0..x15).
inline constexpr std::size_t kMaxVariables = 16;

enum class ExprOp { constant, variable, neg, add, sub, mul, div, pow, sin, cos, exp, log, sqrt };

struct ExprNode {
  ExprOp op = ExprOp::constant;
  double value = 0.0;   // constant value, or the exponent of `pow`
  std::size_t var = 0;  // variable index
  int lhs = -1;         // operand of unary ops / left operand
  int rhs = -1;
};

/// Immutable expression tree for a smooth scalar function of `dimension()`
/// variables. Nodes are stored in post-order, children before parents, with
/// the root last.
class ExpressionAst {
 public:
  ExpressionAst(std::size_t dimension, std::vector<ExprNode> nodes,
                std::vector<std::string> variable_names);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  const std::vector<std::string>& variable_names() const noexcept { return names_; }
  bool is_constant() const;

  /// Fully parenthesised text that parses back to an equivalent tree.
  std::string to_string() const;

  /// Plain value evaluation, no derivatives.
  double evaluate(std::span<const double> x) const;

  /// Exact value, gradient and Hessian by second-order forward propagation.
  JetValue jet(std::span<const double> x) const;

 private:
  std::string node_text(int index) const;

  std::size_t dimension_;
  std::vector<ExprNode> nodes_;
  std::vector<std::string> names_;
};

/// Parse `text` over variables x0..x{dimension-1}.
///
/// Grammar (EBNF):
///
///     expr    = term { ("+" | "-") term } ;
///     term    = unary { ("*" | "/") unary } ;
///     unary   = ("-" | "+") unary | power ;
///     power   = primary [ "^" unary ] ;          (* exponent must be constant *)
///     primary = number | identifier | func "(" expr ")" | "(" expr ")" ;
///     func    = "sin" | "cos" | "exp" | "log" | "sqrt" ;
///     number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
///
/// `^` binds tighter than unary minus, so `-x0^2` is `-(x0^2)`. The
/// identifier `pi` is the constant. Non-smooth functions (abs, min, max,
/// floor, ...) are rejected with NonSmoothFunction.
ExpressionAst parse_expression(std::string_view text, std::size_t dimension);

/// Same grammar with caller-chosen variable names, e.g. {"phi"} for
/// revolution profiles.
ExpressionAst parse_expression(std::string_view text, std::vector<std::string> variable_names);

/// Jet of `ast` at `x`; thin wrapper over ExpressionAst::jet.
JetValue jet_eval(const ExpressionAst& ast, std::span<const double> x);

}  // namespace gss
