#pragma once

// Generic tree walk shared by the plain, delta and oracle interpreters. A
// Semantics type supplies value_type and one member per operation.

#include <span>
#include <string>

#include "cdd/error.hpp"
#include "cdd/expr.hpp"

namespace cdd::detail {

template <class Semantics>
typename Semantics::value_type evaluate(const Node& n,
                                        std::span<const typename Semantics::value_type> vars,
                                        const Semantics& sem) {
  using T = typename Semantics::value_type;
  switch (n.kind) {
    case NodeKind::literal:
      return sem.literal(n.literal);
    case NodeKind::variable:
      return vars[n.variable];
    default:
      break;
  }
  const T lhs = evaluate(*n.lhs, vars, sem);
  const bool binary = n.kind != NodeKind::negate && n.kind != NodeKind::call;
  const T rhs = binary ? evaluate(*n.rhs, vars, sem) : T{};
  try {
    switch (n.kind) {
      case NodeKind::negate: return sem.neg(lhs);
      case NodeKind::add: return sem.add(lhs, rhs);
      case NodeKind::subtract: return sem.sub(lhs, rhs);
      case NodeKind::multiply: return sem.mul(lhs, rhs);
      case NodeKind::divide: return sem.div(lhs, rhs);
      case NodeKind::power: return sem.pow(lhs, rhs);
      case NodeKind::call: return sem.call(n.function, lhs);
      default: break;
    }
  } catch (const Error& e) {
    if (e.offset()) throw;
    throw Error(e.code(), e.detail() + " (at offset " + std::to_string(n.offset) + ")", n.offset);
  }
  throw Error(Errc::invalid_input, "malformed expression node");
}

}  // namespace cdd::detail
