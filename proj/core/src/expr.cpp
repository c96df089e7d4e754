#include "cdd/expr.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cdd/branch.hpp"
#include "cdd/error.hpp"
#include "expr_eval.hpp"
#include "text.hpp"

namespace cdd {
namespace {

constexpr std::array<std::pair<Function, std::string_view>, 6> kFunctionNames = {{
    {Function::exp, "exp"},
    {Function::log, "log"},
    {Function::sqrt, "sqrt"},
    {Function::sq, "sq"},
    {Function::recip, "recip"},
    {Function::penalty, "penalty"},
}};

bool is_binary(NodeKind k) {
  return k == NodeKind::add || k == NodeKind::subtract || k == NodeKind::multiply ||
         k == NodeKind::divide || k == NodeKind::power;
}

void check_tree(const Node& n, std::size_t arity) {
  switch (n.kind) {
    case NodeKind::literal:
      if (!std::isfinite(n.literal)) throw Error(Errc::invalid_input, "literal must be finite");
      return;
    case NodeKind::variable:
      if (n.variable >= arity) {
        throw Error(Errc::arity, "variable x" + std::to_string(n.variable) +
                                     " exceeds arity " + std::to_string(arity));
      }
      return;
    case NodeKind::negate:
    case NodeKind::call:
      if (!n.lhs || n.rhs) throw Error(Errc::invalid_input, "unary node needs one operand");
      check_tree(*n.lhs, arity);
      return;
    default:
      if (!n.lhs || !n.rhs) throw Error(Errc::invalid_input, "binary node needs two operands");
      check_tree(*n.lhs, arity);
      check_tree(*n.rhs, arity);
      return;
  }
}

std::size_t count_nodes(const Node& n) {
  return 1 + (n.lhs ? count_nodes(*n.lhs) : 0) + (n.rhs ? count_nodes(*n.rhs) : 0);
}

std::size_t tree_depth(const Node& n) {
  return 1 + std::max(n.lhs ? tree_depth(*n.lhs) : 0, n.rhs ? tree_depth(*n.rhs) : 0);
}

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::literal:
      return std::bit_cast<std::uint64_t>(a.literal) == std::bit_cast<std::uint64_t>(b.literal);
    case NodeKind::variable:
      return a.variable == b.variable;
    case NodeKind::call:
      return a.function == b.function && same_tree(*a.lhs, *b.lhs);
    case NodeKind::negate:
      return same_tree(*a.lhs, *b.lhs);
    default:
      return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

// Binding strength used by the formatter: sums 1, products 2, unary minus 3,
// powers 4, atoms 5.
int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::add:
    case NodeKind::subtract: return 1;
    case NodeKind::multiply:
    case NodeKind::divide: return 2;
    case NodeKind::negate: return 3;
    case NodeKind::power: return 4;
    default: return 5;
  }
}

void format_node(const Node& n, std::string& out);

void format_child(const Node& child, bool parens, std::string& out) {
  if (parens) out += '(';
  format_node(child, out);
  if (parens) out += ')';
}

void format_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::literal:
      out += detail::format_double(n.literal);
      return;
    case NodeKind::variable:
      out += 'x';
      out += std::to_string(n.variable);
      return;
    case NodeKind::call:
      out += function_name(n.function);
      out += '(';
      format_node(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::negate:
      out += '-';
      format_child(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case NodeKind::power:
      // The base must be an atom; the exponent is a factor.
      format_child(*n.lhs, precedence(*n.lhs) < 5, out);
      out += '^';
      format_child(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
    default: {
      const int p = precedence(n);
      format_child(*n.lhs, precedence(*n.lhs) < p, out);
      switch (n.kind) {
        case NodeKind::add: out += " + "; break;
        case NodeKind::subtract: out += " - "; break;
        case NodeKind::multiply: out += " * "; break;
        default: out += " / "; break;
      }
      // Left-associative: an equal-precedence right operand needs parentheses.
      format_child(*n.rhs, precedence(*n.rhs) <= p, out);
      return;
    }
  }
}

double plain_checked(double v, const char* op) {
  if (std::isnan(v)) throw Error(Errc::domain, std::string(op) + ": result is not a number");
  if (std::isinf(v)) throw Error(Errc::overflow, std::string(op) + ": result overflows");
  return v;
}

struct PlainSemantics {
  using value_type = double;

  double literal(double v) const { return v; }
  double neg(double a) const { return -a; }
  double add(double a, double b) const { return plain_checked(a + b, "add"); }
  double sub(double a, double b) const { return plain_checked(a - b, "sub"); }
  double mul(double a, double b) const { return plain_checked(a * b, "mul"); }
  double div(double a, double b) const {
    if (b == 0.0) throw Error(Errc::domain, "div: division by zero");
    return plain_checked(a / b, "div");
  }
  double recip(double a) const {
    if (a == 0.0) throw Error(Errc::domain, "reciprocal: zero denominator");
    return plain_checked(1.0 / a, "reciprocal");
  }
  double sqrt(double a) const {
    if (a < 0.0) throw Error(Errc::domain, "sqrt: negative radicand");
    return std::sqrt(a);
  }
  double log(double a) const {
    if (!(a > 0.0)) throw Error(Errc::domain, "log: nonpositive argument");
    return std::log(a);
  }
  double pow(double a, double b) const {
    if (b == 2.0) return plain_checked(a * a, "pow");
    if (b == 0.5) return sqrt(a);
    if (b == -1.0) return recip(a);
    if (!(a > 0.0)) throw Error(Errc::domain, "pow: base must be positive");
    return plain_checked(std::pow(a, b), "pow");
  }
  double call(Function f, double a) const {
    switch (f) {
      case Function::exp: return plain_checked(std::exp(a), "exp");
      case Function::log: return log(a);
      case Function::sqrt: return sqrt(a);
      case Function::sq: return plain_checked(a * a, "sq");
      case Function::recip: return recip(a);
      case Function::penalty: {
        const double m = std::max(0.0, a);
        return plain_checked(m * m, "penalty");
      }
    }
    throw Error(Errc::invalid_input, "unknown function");
  }
};

struct DeltaSemantics {
  using value_type = DeltaScalar;

  DeltaScalar literal(double v) const { return lift_parameter(v); }
  DeltaScalar neg(const DeltaScalar& a) const { return cdd::neg(a); }
  DeltaScalar add(const DeltaScalar& a, const DeltaScalar& b) const { return cdd::add(a, b); }
  DeltaScalar sub(const DeltaScalar& a, const DeltaScalar& b) const { return cdd::sub(a, b); }
  DeltaScalar mul(const DeltaScalar& a, const DeltaScalar& b) const { return cdd::mul(a, b); }
  DeltaScalar div(const DeltaScalar& a, const DeltaScalar& b) const { return cdd::div(a, b); }
  DeltaScalar pow(const DeltaScalar& a, const DeltaScalar& b) const { return cdd::pow(a, b); }
  DeltaScalar call(Function f, const DeltaScalar& a) const {
    switch (f) {
      case Function::exp: return cdd::exp(a);
      case Function::log: return cdd::log(a);
      case Function::sqrt: return cdd::sqrt(a);
      case Function::sq: return square(a);
      case Function::recip: return reciprocal(a);
      case Function::penalty: return penalty_delta(a);
    }
    throw Error(Errc::invalid_input, "unknown function");
  }
};

void require_arity(const Expr& e, std::size_t n, const char* what) {
  if (n != e.arity()) {
    throw Error(Errc::arity, std::string(what) + " has " + std::to_string(n) +
                                 " entries, expression arity is " + std::to_string(e.arity()));
  }
}

}  // namespace

std::string_view function_name(Function f) noexcept {
  for (const auto& [fn, name] : kFunctionNames) {
    if (fn == f) return name;
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) noexcept {
  for (const auto& [fn, fname] : kFunctionNames) {
    if (fname == name) return fn;
  }
  return std::nullopt;
}

namespace build {

NodePtr literal(double v, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::literal;
  n->literal = v;
  n->offset = offset;
  return n;
}

NodePtr variable(std::size_t index, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->variable = index;
  n->offset = offset;
  return n;
}

NodePtr negate(NodePtr operand, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::negate;
  n->lhs = std::move(operand);
  n->offset = offset;
  return n;
}

NodePtr binary(NodeKind kind, NodePtr lhs, NodePtr rhs, std::size_t offset) {
  if (!is_binary(kind)) throw Error(Errc::invalid_input, "not a binary node kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->offset = offset;
  return n;
}

NodePtr call(Function f, NodePtr operand, std::size_t offset) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::call;
  n->function = f;
  n->lhs = std::move(operand);
  n->offset = offset;
  return n;
}

}  // namespace build

Expr::Expr(NodePtr root, std::size_t arity) : root_(std::move(root)), arity_(arity) {
  if (!root_) throw Error(Errc::invalid_input, "expression has no root");
  if (arity_ > kMaxArity) {
    throw Error(Errc::arity, "arity may not exceed " + std::to_string(kMaxArity));
  }
  check_tree(*root_, arity_);
}

std::size_t Expr::node_count() const noexcept { return count_nodes(*root_); }
std::size_t Expr::depth() const noexcept { return tree_depth(*root_); }

bool structurally_equal(const Expr& a, const Expr& b) noexcept {
  return a.arity() == b.arity() && same_tree(a.root(), b.root());
}

std::string format(const Expr& e) {
  std::string out;
  format_node(e.root(), out);
  return out;
}

double eval_plain(const Expr& e, std::span<const double> x) {
  require_arity(e, x.size(), "x");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, "inputs must be finite");
  }
  return detail::evaluate(e.root(), x, PlainSemantics{});
}

DeltaScalar eval_delta(const Expr& e, std::span<const double> x, std::span<const double> s) {
  require_arity(e, x.size(), "x");
  require_arity(e, s.size(), "s");
  std::vector<DeltaScalar> vars;
  vars.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) vars.push_back(seed_input(x[i], s[i]));
  return detail::evaluate(e.root(), std::span<const DeltaScalar>(vars), DeltaSemantics{});
}

}  // namespace cdd
