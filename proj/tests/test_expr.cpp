#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "reachlab/expr.hpp"

using namespace reachlab;

namespace {

// Independent tree used to generate random expressions and evaluate them
// recursively.
struct Node {
  enum Kind { Const, Var, Neg, Func, Bin } kind = Const;
  double value = 0.0;
  int var = 0;
  std::string name;  // function name or operator
  std::unique_ptr<Node> a, b;
};

std::string render(const Node& n) {
  switch (n.kind) {
    case Node::Const: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Node::Var: return "x" + std::to_string(n.var);
    case Node::Neg: return "(-" + render(*n.a) + ")";
    case Node::Func: return n.name + "(" + render(*n.a) + ")";
    case Node::Bin: return "(" + render(*n.a) + " " + n.name + " " + render(*n.b) + ")";
  }
  return "";
}

double reference(const Node& n, const std::vector<double>& x) {
  switch (n.kind) {
    case Node::Const: return n.value;
    case Node::Var: return x[n.var];
    case Node::Neg: return -reference(*n.a, x);
    case Node::Func: {
      const double v = reference(*n.a, x);
      if (n.name == "sin") return std::sin(v);
      if (n.name == "cos") return std::cos(v);
      if (n.name == "exp") return std::exp(v);
      if (n.name == "tanh") return std::tanh(v);
      if (n.name == "abs") return std::fabs(v);
      return std::sqrt(v);
    }
    case Node::Bin: {
      const double a = reference(*n.a, x), b = reference(*n.b, x);
      if (n.name == "+") return a + b;
      if (n.name == "-") return a - b;
      if (n.name == "*") return a * b;
      if (n.name == "/") return a / b;
      return std::pow(a, b);
    }
  }
  return 0.0;
}

std::unique_ptr<Node> random_tree(std::mt19937_64& rng, int depth, int nvars) {
  std::uniform_int_distribution<int> pick(0, 9);
  auto n = std::make_unique<Node>();
  const int choice = depth <= 0 ? pick(rng) % 2 : pick(rng);
  if (choice == 0) {
    n->kind = Node::Const;
    n->value = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  } else if (choice == 1) {
    n->kind = Node::Var;
    n->var = std::uniform_int_distribution<int>(0, nvars - 1)(rng);
  } else if (choice == 2) {
    n->kind = Node::Neg;
    n->a = random_tree(rng, depth - 1, nvars);
  } else if (choice <= 4) {
    static const char* names[] = {"sin", "cos", "exp", "tanh", "abs", "sqrt"};
    n->kind = Node::Func;
    n->name = names[std::uniform_int_distribution<int>(0, 5)(rng)];
    n->a = random_tree(rng, depth - 1, nvars);
  } else {
    static const char* ops[] = {"+", "-", "*", "/", "^"};
    n->kind = Node::Bin;
    n->name = ops[std::uniform_int_distribution<int>(0, 4)(rng)];
    n->a = random_tree(rng, depth - 1, nvars);
    n->b = random_tree(rng, depth - 1, nvars);
  }
  return n;
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("precedence and identity examples") {
    CHECK(parse_expression("1+2*3", {}).eval(std::span<const double>{}) == 7.0);
    const Expr e = parse_expression("x1", {"x0", "x1"});
    REQUIRE(e.nodes().size() == 1);
    CHECK(e.nodes()[0].kind == NodeKind::Variable);
    CHECK(e.variables()[e.nodes()[0].var] == "x1");
  }

  TEST_CASE("syntax error position for an unbalanced parenthesis") {
    try {
      (void)parse_expression("x0 + (", {"x0"});
      FAIL("expected a syntax error");
    } catch (const ExprError& err) {
      CHECK(err.kind() == ExprError::Kind::Syntax);
      CHECK(err.position() == 7);
    }
  }

  TEST_CASE("evaluation examples") {
    const std::vector<std::string> vars{"x0", "x1"};
    CHECK(eval_expression(parse_expression("x1 + 2*sin(x0)", vars), {{"x0", 0.0}, {"x1", 3.0}}) == 3.0);
    CHECK(eval_expression(parse_expression("x0^2", vars), {{"x0", -2.0}}) == 4.0);
    try {
      (void)eval_expression(parse_expression("1/x0", vars), {{"x0", 0.0}});
      FAIL("expected a domain error");
    } catch (const ExprError& err) {
      CHECK(err.kind() == ExprError::Kind::Domain);
    }
  }

  TEST_CASE("operator precedence and associativity") {
    auto v = [](const char* s) { return parse_expression(s, {}).eval(std::span<const double>{}); };
    CHECK(v("2^3^2") == 512.0);
    CHECK(v("-2^2") == -4.0);
    CHECK(v("2^-1") == 0.5);
    CHECK(v("8/4/2") == 1.0);
    CHECK(v("10-4-3") == 3.0);
    CHECK(v("-(-3)") == 3.0);
    CHECK(v("2*-3") == -6.0);
    CHECK(v("1e-3*1000") == doctest::Approx(1.0));
    CHECK(v("abs(-1.5) + sqrt(4) + exp(0) + cos(0) + tanh(0)") == 5.5);
  }

  TEST_CASE("rejected inputs") {
    auto kind_of = [](const char* s, std::vector<std::string> vars = {"x0"}) {
      try {
        (void)parse_expression(s, vars);
      } catch (const ExprError& e) {
        return e.kind();
      }
      FAIL("no error for " << s);
      return ExprError::Kind::Syntax;
    };
    CHECK(kind_of("2x0") == ExprError::Kind::Syntax);
    CHECK(kind_of("") == ExprError::Kind::Syntax);
    CHECK(kind_of("1 +") == ExprError::Kind::Syntax);
    CHECK(kind_of("(1))") == ExprError::Kind::Syntax);
    CHECK(kind_of("y + 1") == ExprError::Kind::UnknownIdentifier);
    CHECK(kind_of("log(x0)") == ExprError::Kind::UnknownFunction);
    CHECK(kind_of("x0 $ 1") == ExprError::Kind::Syntax);
  }

  TEST_CASE("domain errors are reported, never NaN") {
    const std::vector<std::string> vars{"x0"};
    for (const char* src : {"sqrt(x0)", "x0^0.5", "0^(x0)", "exp(1000*x0)"}) {
      const Expr e = parse_expression(src, vars);
      const double x = std::string(src) == "0^(x0)" ? -1.0 : (std::string(src) == "exp(1000*x0)" ? 1.0 : -1.0);
      CHECK_THROWS_AS(e.eval(std::vector<double>{x}), ExprError);
    }
    CHECK(parse_expression("x0^3", vars).eval(std::vector<double>{-2.0}) == -8.0);
  }

  TEST_CASE("unbound variable") {
    const Expr e = parse_expression("x0 + x1", {"x0", "x1"});
    try {
      (void)eval_expression(e, {{"x0", 1.0}});
      FAIL("expected an unbound-variable error");
    } catch (const ExprError& err) {
      CHECK(err.kind() == ExprError::Kind::UnboundVariable);
    }
    CHECK(eval_expression(parse_expression("x1", {"x0", "x1"}), {{"x1", 2.0}}) == 2.0);
  }

  TEST_CASE("1000 random expressions match a naive recursive evaluator") {
    std::mt19937_64 rng(20240601);
    const auto vars = state_variable_names(3);
    int checked = 0;
    while (checked < 1000) {
      const auto tree = random_tree(rng, 4, 3);
      std::vector<double> x(3);
      for (auto& xi : x) xi = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
      const double ref = reference(*tree, x);
      if (!std::isfinite(ref) || std::fabs(ref) > 1e200) continue;
      const Expr e = parse_expression(render(*tree), vars);
      double got = 0.0;
      try {
        got = e.eval(x);
      } catch (const ExprError&) {
        continue;  // domain error where the reference produced a value by accident (e.g. 0^-1 guarded)
      }
      const double scale = std::max(std::fabs(ref), 1e-300);
      CHECK_MESSAGE(std::fabs(got - ref) <= 1e-12 * scale, render(*tree));
      ++checked;
    }
  }

  TEST_CASE("round trip through to_string is structural identity") {
    std::mt19937_64 rng(7);
    const auto vars = state_variable_names(2);
    for (int i = 0; i < 500; ++i) {
      const auto tree = random_tree(rng, 5, 2);
      const Expr e = parse_expression(render(*tree), vars);
      const Expr again = parse_expression(e.to_string(), vars);
      CHECK(again == e);
    }
    for (const char* s : {"-x0^2", "(-x0)^2", "2^-x1", "-(x0 - -x1)", "1e-300/3"}) {
      const Expr e = parse_expression(s, vars);
      CHECK(parse_expression(e.to_string(), vars) == e);
    }
  }

  TEST_CASE("evaluation is deterministic") {
    const Expr e = parse_expression("sin(x0)*exp(x1) - tanh(x0/x1)", {"x0", "x1"});
    const std::vector<double> x{0.3, -1.7};
    const double a = e.eval(x);
    CHECK(e.eval(x) == a);
  }
}
