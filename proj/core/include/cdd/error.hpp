#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdd {

enum class Errc {
  invalid_input,
  domain,
  overflow,
  shape,
  singular,
  syntax,
  arity,
  unknown_identifier,
  unsupported,
  validation,
  state,
  numerical,
  degenerate_model,
  io,
};

std::string_view to_string(Errc code) noexcept;

/// The single exception type thrown by the library. `code()` classifies the
/// failure; `offset()` is set when the failure can be attributed to a byte
/// position in parsed source text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

  /// The message without the "<code>: " prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::optional<std::size_t> offset_;
  std::string detail_;
};

}  // namespace cdd
