#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reachlab/error.hpp"

namespace reachlab {

/// Raised by the expression parser and evaluator.
///
/// `position` is the 1-based byte offset into the source for syntax errors
/// (one past the last character when input ended early) and 0 otherwise.
class ExprError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, UnknownFunction, UnboundVariable, Domain };

  ExprError(Kind kind, std::size_t position, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

enum class NodeKind : std::uint8_t { Constant, Variable, Unary, Binary };
enum class UnaryOp : std::uint8_t { Neg, Sin, Cos, Exp, Tanh, Abs, Sqrt };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  double value = 0.0;       // Constant
  std::uint32_t var = 0;    // Variable: index into Expr::variables()
  std::int32_t lhs = -1;    // Unary operand or binary left operand
  std::int32_t rhs = -1;    // Binary right operand

  bool operator==(const ExprNode&) const = default;
};

/// Immutable scalar expression over a fixed, ordered variable list.
///
/// Nodes are stored in post-order (every child precedes its parent, the root
/// is last), so evaluation is a single forward sweep.
class Expr {
 public:
  Expr() = default;

  /// Parses `src`; identifiers must name an entry of `variables` or be one of
  /// sin, cos, exp, tanh, abs, sqrt applied with parentheses.
  static Expr parse(std::string_view src, std::vector<std::string> variables);

  /// Evaluates with `values[i]` bound to `variables()[i]`.
  double eval(std::span<const double> values) const;

  /// Evaluates with named bindings. Only variables that occur in the tree
  /// need to be bound.
  double eval(const std::map<std::string, double>& bindings) const;

  /// Fully parenthesized text that re-parses to a structurally equal tree.
  std::string to_string() const;

  const std::vector<ExprNode>& nodes() const noexcept { return nodes_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

  /// Structural equality (same node sequence, same variable list).
  bool operator==(const Expr&) const = default;

 private:
  friend class ExprParser;

  std::vector<ExprNode> nodes_;
  std::vector<std::string> variables_;
};

Expr parse_expression(std::string_view src, const std::vector<std::string>& allowed_vars);
double eval_expression(const Expr& ast, const std::map<std::string, double>& bindings);

/// Names `x0 … x{n-1}`.
std::vector<std::string> state_variable_names(std::size_t n);

}  // namespace reachlab
