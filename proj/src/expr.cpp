#include "gss/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <utility>

#include "gss/error.hpp"

namespace gss {
namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
  double number = 0.0;
};

[[noreturn]] void fail(ErrorKind kind, std::size_t pos, const std::string& what) {
  throw Error(kind, what + " at column " + std::to_string(pos + 1));
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const std::size_t start = i;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      Token t{Tok::number, start, std::string(s.substr(start, i - start))};
      const auto* first = t.text.data();
      const auto* last = first + t.text.size();
      auto [ptr, ec] = std::from_chars(first, last, t.number);
      if (ec != std::errc() || ptr != last) fail(ErrorKind::syntax, start, "malformed number '" + t.text + "'");
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::ident, start, std::string(s.substr(start, i - start))});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '*': kind = Tok::star; break;
      case '/': kind = Tok::slash; break;
      case '^': kind = Tok::caret; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      default: fail(ErrorKind::syntax, i, "unexpected character");
    }
    out.push_back({kind, i, std::string(1, static_cast<char>(c))});
    ++i;
  }
  out.push_back({Tok::end, s.size(), ""});
  return out;
}

constexpr std::array kNonSmooth = {"abs", "fabs", "min", "max", "floor", "ceil", "round", "trunc",
                                   "sign", "sgn", "mod", "fmod", "heaviside", "step"};

std::optional<ExprOp> function_op(const std::string& name) {
  if (name == "sin") return ExprOp::sin;
  if (name == "cos") return ExprOp::cos;
  if (name == "exp") return ExprOp::exp;
  if (name == "log") return ExprOp::log;
  if (name == "sqrt") return ExprOp::sqrt;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& names)
      : tokens_(tokenize(text)), names_(names) {}

  std::vector<ExprNode> run() {
    parse_expr();
    if (peek().kind != Tok::end) fail(ErrorKind::syntax, peek().pos, "unexpected '" + peek().text + "'");
    return std::move(nodes_);
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  const Token& next() { return tokens_[at_++]; }

  int push(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const auto op = next().kind == Tok::plus ? ExprOp::add : ExprOp::sub;
      const int rhs = parse_term();
      lhs = push({op, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const auto op = next().kind == Tok::star ? ExprOp::mul : ExprOp::div;
      const int rhs = parse_unary();
      lhs = push({op, 0.0, 0, lhs, rhs});
    }
    return lhs;
  }

  int parse_unary() {
    if (peek().kind == Tok::minus) {
      next();
      const int operand = parse_unary();
      return push({ExprOp::neg, 0.0, 0, operand, -1});
    }
    if (peek().kind == Tok::plus) {
      next();
      return parse_unary();
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (peek().kind != Tok::caret) return base;
    const std::size_t pos = next().pos;
    const std::size_t mark = nodes_.size();
    const int exponent = parse_unary();
    const auto folded = fold_constant(exponent);
    if (!folded) fail(ErrorKind::syntax, pos, "exponent of '^' must be a constant");
    nodes_.resize(mark);  // exponent subtree is folded into the pow node
    return push({ExprOp::pow, *folded, 0, base, -1});
  }

  int parse_primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::number: return push({ExprOp::constant, t.number, 0, -1, -1});
      case Tok::lparen: {
        const int inner = parse_expr();
        if (peek().kind != Tok::rparen) fail(ErrorKind::syntax, peek().pos, "expected ')'");
        next();
        return inner;
      }
      case Tok::ident: return parse_identifier(t);
      case Tok::end: fail(ErrorKind::syntax, t.pos, "unexpected end of input");
      default: fail(ErrorKind::syntax, t.pos, "unexpected '" + t.text + "'");
    }
  }

  int parse_identifier(const Token& t) {
    for (const char* bad : kNonSmooth)
      if (t.text == bad) fail(ErrorKind::non_smooth_function, t.pos, "'" + t.text + "' is not smooth");
    if (auto op = function_op(t.text)) {
      if (peek().kind != Tok::lparen) fail(ErrorKind::syntax, peek().pos, "expected '(' after " + t.text);
      next();
      const int arg = parse_expr();
      if (peek().kind != Tok::rparen) fail(ErrorKind::syntax, peek().pos, "expected ')'");
      next();
      return push({*op, 0.0, 0, arg, -1});
    }
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == t.text) return push({ExprOp::variable, 0.0, i, -1, -1});
    if (t.text == "pi") return push({ExprOp::constant, std::numbers::pi, 0, -1, -1});
    if (t.text.size() > 1 && t.text[0] == 'x') {
      bool digits = true;
      for (std::size_t k = 1; k < t.text.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(t.text[k]));
      if (digits)
        fail(ErrorKind::dimension_mismatch, t.pos,
             "variable '" + t.text + "' exceeds declared dimension " + std::to_string(names_.size()));
    }
    fail(ErrorKind::unknown_identifier, t.pos, "unknown identifier '" + t.text + "'");
  }

  std::optional<double> fold_constant(int index) const {
    const ExprNode& n = nodes_[static_cast<std::size_t>(index)];
    auto sub = [&](int i) { return fold_constant(i); };
    switch (n.op) {
      case ExprOp::constant: return n.value;
      case ExprOp::variable: return std::nullopt;
      case ExprOp::neg: {
        auto a = sub(n.lhs);
        return a ? std::optional(-*a) : std::nullopt;
      }
      case ExprOp::pow: {
        auto a = sub(n.lhs);
        return a ? std::optional(std::pow(*a, n.value)) : std::nullopt;
      }
      case ExprOp::add:
      case ExprOp::sub:
      case ExprOp::mul:
      case ExprOp::div: {
        auto a = sub(n.lhs);
        auto b = sub(n.rhs);
        if (!a || !b) return std::nullopt;
        if (n.op == ExprOp::add) return *a + *b;
        if (n.op == ExprOp::sub) return *a - *b;
        if (n.op == ExprOp::mul) return *a * *b;
        return *a / *b;
      }
      default: {
        auto a = sub(n.lhs);
        if (!a) return std::nullopt;
        switch (n.op) {
          case ExprOp::sin: return std::sin(*a);
          case ExprOp::cos: return std::cos(*a);
          case ExprOp::exp: return std::exp(*a);
          case ExprOp::log: return std::log(*a);
          default: return std::sqrt(*a);
        }
      }
    }
  }

  std::vector<Token> tokens_;
  const std::vector<std::string>& names_;
  std::vector<ExprNode> nodes_;
  std::size_t at_ = 0;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_integer(double p) { return std::floor(p) == p && std::abs(p) < 1e15; }

}  // namespace

ExpressionAst::ExpressionAst(std::size_t dimension, std::vector<ExprNode> nodes,
                             std::vector<std::string> variable_names)
    : dimension_(dimension), nodes_(std::move(nodes)), names_(std::move(variable_names)) {}

bool ExpressionAst::is_constant() const {
  for (const auto& n : nodes_)
    if (n.op == ExprOp::variable) return false;
  return true;
}

std::string ExpressionAst::node_text(int index) const {
  const ExprNode& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case ExprOp::constant: return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case ExprOp::variable: return names_[n.var];
    case ExprOp::neg: return "(-" + node_text(n.lhs) + ")";
    case ExprOp::add: return "(" + node_text(n.lhs) + " + " + node_text(n.rhs) + ")";
    case ExprOp::sub: return "(" + node_text(n.lhs) + " - " + node_text(n.rhs) + ")";
    case ExprOp::mul: return "(" + node_text(n.lhs) + " * " + node_text(n.rhs) + ")";
    case ExprOp::div: return "(" + node_text(n.lhs) + " / " + node_text(n.rhs) + ")";
    case ExprOp::pow: return "(" + node_text(n.lhs) + "^(" + format_number(n.value) + "))";
    case ExprOp::sin: return "sin(" + node_text(n.lhs) + ")";
    case ExprOp::cos: return "cos(" + node_text(n.lhs) + ")";
    case ExprOp::exp: return "exp(" + node_text(n.lhs) + ")";
    case ExprOp::log: return "log(" + node_text(n.lhs) + ")";
    case ExprOp::sqrt: return "sqrt(" + node_text(n.lhs) + ")";
  }
  return {};
}

std::string ExpressionAst::to_string() const { return node_text(static_cast<int>(nodes_.size()) - 1); }

double ExpressionAst::evaluate(std::span<const double> x) const {
  if (x.size() != dimension_)
    throw Error(ErrorKind::dimension_mismatch, "point has " + std::to_string(x.size()) + " coordinates, expected " +
                                                   std::to_string(dimension_));
  std::vector<double> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    const double a = n.lhs >= 0 ? v[static_cast<std::size_t>(n.lhs)] : 0.0;
    const double b = n.rhs >= 0 ? v[static_cast<std::size_t>(n.rhs)] : 0.0;
    auto domain = [&](const char* what) {
      throw Error(ErrorKind::domain, std::string(what) + " in " + node_text(static_cast<int>(i)));
    };
    switch (n.op) {
      case ExprOp::constant: v[i] = n.value; break;
      case ExprOp::variable: v[i] = x[n.var]; break;
      case ExprOp::neg: v[i] = -a; break;
      case ExprOp::add: v[i] = a + b; break;
      case ExprOp::sub: v[i] = a - b; break;
      case ExprOp::mul: v[i] = a * b; break;
      case ExprOp::div:
        if (b == 0.0) domain("division by zero");
        v[i] = a / b;
        break;
      case ExprOp::pow:
        if (!is_integer(n.value) && a < 0.0) domain("non-integer power of a negative number");
        if (n.value < 0.0 && a == 0.0) domain("negative power of zero");
        v[i] = std::pow(a, n.value);
        break;
      case ExprOp::sin: v[i] = std::sin(a); break;
      case ExprOp::cos: v[i] = std::cos(a); break;
      case ExprOp::exp: v[i] = std::exp(a); break;
      case ExprOp::log:
        if (a <= 0.0) domain("log of a non-positive number");
        v[i] = std::log(a);
        break;
      case ExprOp::sqrt:
        if (a < 0.0) domain("sqrt of a negative number");
        v[i] = std::sqrt(a);
        break;
    }
  }
  return v.back();
}

JetValue ExpressionAst::jet(std::span<const double> x) const {
  if (x.size() != dimension_)
    throw Error(ErrorKind::dimension_mismatch, "point has " + std::to_string(x.size()) + " coordinates, expected " +
                                                   std::to_string(dimension_));
  std::vector<JetValue> v;
  v.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    auto domain = [&](const char* what) {
      throw Error(ErrorKind::domain, std::string(what) + " in " + node_text(static_cast<int>(i)));
    };
    auto operand = [&](int k) -> const JetValue& { return v[static_cast<std::size_t>(k)]; };
    switch (n.op) {
      case ExprOp::constant: v.emplace_back(dimension_, n.value); break;
      case ExprOp::variable: v.push_back(JetValue::variable(dimension_, n.var, x[n.var])); break;
      case ExprOp::neg: v.push_back(-operand(n.lhs)); break;
      case ExprOp::add: v.push_back(operand(n.lhs) + operand(n.rhs)); break;
      case ExprOp::sub: v.push_back(operand(n.lhs) - operand(n.rhs)); break;
      case ExprOp::mul: v.push_back(operand(n.lhs) * operand(n.rhs)); break;
      case ExprOp::div:
        if (operand(n.rhs).value() == 0.0) domain("division by zero");
        v.push_back(operand(n.lhs) / operand(n.rhs));
        break;
      case ExprOp::pow: {
        const JetValue& u = operand(n.lhs);
        const double p = n.value;
        const double a = u.value();
        if (p == 0.0) {
          v.emplace_back(dimension_, 1.0);
          break;
        }
        if (!is_integer(p) && a < 0.0) domain("non-integer power of a negative number");
        if (a == 0.0 && p < 2.0 && p != 1.0) domain("power not twice differentiable at zero");
        const double g1 = p * std::pow(a, p - 1.0);
        const double g2 = p == 1.0 ? 0.0 : p * (p - 1.0) * std::pow(a, p - 2.0);
        v.push_back(u.compose(std::pow(a, p), g1, g2));
        break;
      }
      case ExprOp::sin: {
        const double a = operand(n.lhs).value();
        v.push_back(operand(n.lhs).compose(std::sin(a), std::cos(a), -std::sin(a)));
        break;
      }
      case ExprOp::cos: {
        const double a = operand(n.lhs).value();
        v.push_back(operand(n.lhs).compose(std::cos(a), -std::sin(a), -std::cos(a)));
        break;
      }
      case ExprOp::exp: {
        const double e = std::exp(operand(n.lhs).value());
        v.push_back(operand(n.lhs).compose(e, e, e));
        break;
      }
      case ExprOp::log: {
        const double a = operand(n.lhs).value();
        if (a <= 0.0) domain("log of a non-positive number");
        v.push_back(operand(n.lhs).compose(std::log(a), 1.0 / a, -1.0 / (a * a)));
        break;
      }
      case ExprOp::sqrt: {
        const double a = operand(n.lhs).value();
        if (a <= 0.0) domain(a < 0.0 ? "sqrt of a negative number" : "sqrt not differentiable at zero");
        const double r = std::sqrt(a);
        v.push_back(operand(n.lhs).compose(r, 0.5 / r, -0.25 / (a * r)));
        break;
      }
    }
  }
  return std::move(v.back());
}

ExpressionAst parse_expression(std::string_view text, std::vector<std::string> variable_names) {
  if (variable_names.empty() || variable_names.size() > kMaxVariables)
    throw Error(ErrorKind::dimension_mismatch,
                "dimension must be between 1 and " + std::to_string(kMaxVariables));
  Parser parser(text, variable_names);
  auto nodes = parser.run();
  const auto dim = variable_names.size();
  return ExpressionAst(dim, std::move(nodes), std::move(variable_names));
}

ExpressionAst parse_expression(std::string_view text, std::size_t dimension) {
  if (dimension == 0 || dimension > kMaxVariables)
    throw Error(ErrorKind::dimension_mismatch,
                "dimension must be between 1 and " + std::to_string(kMaxVariables));
  std::vector<std::string> names;
  for (std::size_t i = 0; i < dimension; ++i) names.push_back("x" + std::to_string(i));
  return parse_expression(text, std::move(names));
}

JetValue jet_eval(const ExpressionAst& ast, std::span<const double> x) { return ast.jet(x); }

}  // namespace gss
