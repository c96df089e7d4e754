#pragma once

// A small expression language and its lifted interpreter.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
// Variables are x0 … x9; functions are exp, log, sqrt, sq, recip, penalty.
// There are no comparisons or conditionals: the only branching constructs
// are the ones whose divided differences stay accurate (penalty here,
// splines and linear solves through their own modules).

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "cdd/delta_scalar.hpp"

namespace cdd {

enum class NodeKind { literal, variable, negate, add, subtract, multiply, divide, power, call };
enum class Function { exp, log, sqrt, sq, recip, penalty };

std::string_view function_name(Function f) noexcept;
std::optional<Function> function_from_name(std::string_view name) noexcept;

inline constexpr std::size_t kMaxArity = 10;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::literal;
  double literal = 0.0;         // kind == literal
  std::size_t variable = 0;     // kind == variable
  Function function = Function::exp;  // kind == call
  NodePtr lhs;                  // sole operand of negate/call, left of binaries
  NodePtr rhs;                  // right of binaries
  std::size_t offset = 0;       // byte offset in the parsed source
};

namespace build {
NodePtr literal(double v, std::size_t offset = 0);
NodePtr variable(std::size_t index, std::size_t offset = 0);
NodePtr negate(NodePtr operand, std::size_t offset = 0);
NodePtr binary(NodeKind kind, NodePtr lhs, NodePtr rhs, std::size_t offset = 0);
NodePtr call(Function f, NodePtr operand, std::size_t offset = 0);
}  // namespace build

/// An immutable expression over `arity` input variables.
class Expr {
 public:
  /// Throws Errc::arity if a variable index is >= arity or arity > kMaxArity,
  /// Errc::invalid_input for a malformed tree.
  Expr(NodePtr root, std::size_t arity);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }
  std::size_t arity() const noexcept { return arity_; }
  std::size_t node_count() const noexcept;
  std::size_t depth() const noexcept;

 private:
  NodePtr root_;
  std::size_t arity_;
};

/// Structural equality; source offsets are ignored, literals compare bitwise.
bool structurally_equal(const Expr& a, const Expr& b) noexcept;

/// Throws Errc::syntax (with byte offset) on malformed text, Errc::arity for
/// a variable beyond `arity`, Errc::unknown_identifier for an unknown name and
/// Errc::unsupported for abs.
Expr parse(std::string_view source, std::size_t arity);

/// Text that parse() maps back to a structurally equal tree. Literals are
/// written with the shortest round-trip decimal.
std::string format(const Expr& e);

/// Ordinary evaluation at working precision. Domain and overflow errors carry
/// the offending node's source offset.
double eval_plain(const Expr& e, std::span<const double> x);

/// (f(x), f(x+s) − f(x)) by the divided-differencing rules, with inputs seeded
/// as (xᵢ, sᵢ) and literals lifted as parameters.
DeltaScalar eval_delta(const Expr& e, std::span<const double> x, std::span<const double> s);

}  // namespace cdd
