#include "cdd/error.hpp"

namespace cdd {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid input";
    case Errc::domain: return "domain error";
    case Errc::overflow: return "overflow";
    case Errc::shape: return "shape error";
    case Errc::singular: return "singular matrix";
    case Errc::syntax: return "syntax error";
    case Errc::arity: return "arity error";
    case Errc::unknown_identifier: return "unknown identifier";
    case Errc::unsupported: return "unsupported";
    case Errc::validation: return "validation error";
    case Errc::state: return "state error";
    case Errc::numerical: return "numerical failure";
    case Errc::degenerate_model: return "degenerate model";
    case Errc::io: return "i/o error";
  }
  return "error";
}

Error::Error(Errc code, const std::string& message, std::optional<std::size_t> offset)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      offset_(offset),
      detail_(message) {}

}  // namespace cdd
