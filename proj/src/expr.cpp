#include "reachlab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

namespace reachlab {

ExprError::ExprError(Kind kind, std::size_t position, const std::string& message)
    : Error(position > 0 ? message + " at position " + std::to_string(position) : message),
      kind_(kind),
      position_(position) {}

namespace {

std::optional<UnaryOp> function_by_name(std::string_view name) {
  if (name == "sin") return UnaryOp::Sin;
  if (name == "cos") return UnaryOp::Cos;
  if (name == "exp") return UnaryOp::Exp;
  if (name == "tanh") return UnaryOp::Tanh;
  if (name == "abs") return UnaryOp::Abs;
  if (name == "sqrt") return UnaryOp::Sqrt;
  return std::nullopt;
}

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Sqrt: return "sqrt";
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

[[noreturn]] void domain_error(const std::string& what) {
  throw ExprError(ExprError::Kind::Domain, 0, "domain error: " + what);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) domain_error(std::string(what) + " produced a non-finite value");
  return v;
}

double apply_unary(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::Neg: return -a;
    case UnaryOp::Sin: return std::sin(a);
    case UnaryOp::Cos: return std::cos(a);
    case UnaryOp::Exp: return checked(std::exp(a), "exp");
    case UnaryOp::Tanh: return std::tanh(a);
    case UnaryOp::Abs: return std::fabs(a);
    case UnaryOp::Sqrt:
      if (a < 0.0) domain_error("sqrt of negative value");
      return std::sqrt(a);
  }
  return a;
}

double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return checked(a + b, "addition");
    case BinaryOp::Sub: return checked(a - b, "subtraction");
    case BinaryOp::Mul: return checked(a * b, "multiplication");
    case BinaryOp::Div:
      if (b == 0.0) domain_error("division by zero");
      return checked(a / b, "division");
    case BinaryOp::Pow:
      if (a < 0.0 && std::trunc(b) != b) domain_error("negative base with non-integer exponent");
      if (a == 0.0 && b < 0.0) domain_error("division by zero (zero base, negative exponent)");
      return checked(std::pow(a, b), "power");
  }
  return a;
}

}  // namespace

// Recursive-descent parser. Precedence, loosest first:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := primary ('^' unary)?
class ExprParser {
 public:
  ExprParser(std::string_view src, Expr& out) : src_(src), out_(out) {}

  void run() {
    parse_sum();
    skip_ws();
    if (pos_ < src_.size()) fail_syntax("unexpected '" + std::string(1, src_[pos_]) + "'");
  }

 private:
  std::int32_t emit(ExprNode node) {
    out_.nodes_.push_back(node);
    return static_cast<std::int32_t>(out_.nodes_.size() - 1);
  }

  std::int32_t emit_binary(BinaryOp op, std::int32_t lhs, std::int32_t rhs) {
    ExprNode n;
    n.kind = NodeKind::Binary;
    n.binary = op;
    n.lhs = lhs;
    n.rhs = rhs;
    return emit(n);
  }

  std::int32_t emit_unary(UnaryOp op, std::int32_t arg) {
    ExprNode n;
    n.kind = NodeKind::Unary;
    n.unary = op;
    n.lhs = arg;
    return emit(n);
  }

  [[noreturn]] void fail_syntax(const std::string& msg) const {
    throw ExprError(ExprError::Kind::Syntax, pos_ + 1, "syntax error: " + msg);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::int32_t parse_sum() {
    std::int32_t lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = emit_binary(BinaryOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = emit_binary(BinaryOp::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_product() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = emit_binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = emit_binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_unary() {
    if (accept('-')) return emit_unary(UnaryOp::Neg, parse_unary());
    return parse_power();
  }

  std::int32_t parse_power() {
    std::int32_t base = parse_primary();
    if (accept('^')) return emit_binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  std::int32_t parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail_syntax("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_sum();
      if (!accept(')')) {
        skip_ws();
        fail_syntax("expected ')'");
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail_syntax("unexpected '" + std::string(1, c) + "'");
  }

  std::int32_t parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail_syntax("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
        fail_syntax("malformed exponent");
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail_syntax("number out of range");
    }
    ExprNode n;
    n.kind = NodeKind::Constant;
    n.value = value;
    return emit(n);
  }

  std::int32_t parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      auto fn = function_by_name(name);
      if (!fn) {
        throw ExprError(ExprError::Kind::UnknownFunction, start + 1,
                        "unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      std::int32_t arg = parse_sum();
      if (!accept(')')) {
        skip_ws();
        fail_syntax("expected ')'");
      }
      return emit_unary(*fn, arg);
    }
    const auto& vars = out_.variables_;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == name) {
        ExprNode n;
        n.kind = NodeKind::Variable;
        n.var = static_cast<std::uint32_t>(i);
        return emit(n);
      }
    }
    throw ExprError(ExprError::Kind::UnknownIdentifier, start + 1,
                    "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  Expr& out_;
  std::size_t pos_ = 0;
};

Expr Expr::parse(std::string_view src, std::vector<std::string> variables) {
  Expr e;
  e.variables_ = std::move(variables);
  ExprParser(src, e).run();
  return e;
}

double Expr::eval(std::span<const double> values) const {
  if (values.size() < variables_.size()) {
    throw ExprError(ExprError::Kind::UnboundVariable, 0,
                    "expected " + std::to_string(variables_.size()) + " variable values, got " +
                        std::to_string(values.size()));
  }
  constexpr std::size_t kInline = 64;
  std::array<double, kInline> inline_buf;
  std::vector<double> heap_buf;
  double* vals = inline_buf.data();
  if (nodes_.size() > kInline) {
    heap_buf.resize(nodes_.size());
    vals = heap_buf.data();
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: vals[i] = n.value; break;
      case NodeKind::Variable: vals[i] = values[n.var]; break;
      case NodeKind::Unary: vals[i] = apply_unary(n.unary, vals[n.lhs]); break;
      case NodeKind::Binary: vals[i] = apply_binary(n.binary, vals[n.lhs], vals[n.rhs]); break;
    }
  }
  return nodes_.empty() ? 0.0 : vals[nodes_.size() - 1];
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
  std::vector<double> values(variables_.size(), 0.0);
  std::vector<bool> used(variables_.size(), false);
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::Variable) used[n.var] = true;
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (!used[i]) continue;
    auto it = bindings.find(variables_[i]);
    if (it == bindings.end()) {
      throw ExprError(ExprError::Kind::UnboundVariable, 0,
                      "unbound variable '" + variables_[i] + "'");
    }
    values[i] = it->second;
  }
  return eval(values);
}

std::string Expr::to_string() const {
  if (nodes_.empty()) return "0";
  std::vector<std::string> text(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        text[i] = buf;
        break;
      }
      case NodeKind::Variable: text[i] = variables_[n.var]; break;
      case NodeKind::Unary:
        if (n.unary == UnaryOp::Neg) {
          text[i] = "(-" + text[n.lhs] + ")";
        } else {
          text[i] = std::string(function_name(n.unary)) + "(" + text[n.lhs] + ")";
        }
        break;
      case NodeKind::Binary:
        text[i] = "(" + text[n.lhs] + " " + binary_symbol(n.binary) + " " + text[n.rhs] + ")";
        break;
    }
  }
  return text.back();
}

Expr parse_expression(std::string_view src, const std::vector<std::string>& allowed_vars) {
  return Expr::parse(src, allowed_vars);
}

double eval_expression(const Expr& ast, const std::map<std::string, double>& bindings) {
  return ast.eval(bindings);
}

std::vector<std::string> state_variable_names(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

}  // namespace reachlab
