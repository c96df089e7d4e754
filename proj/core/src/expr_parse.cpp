#include <cctype>
#include <cmath>
#include <string>

#include "cdd/error.hpp"
#include "cdd/expr.hpp"
#include "text.hpp"

namespace cdd {
namespace {

constexpr std::size_t kMaxNesting = 512;

class Parser {
 public:
  Parser(std::string_view src, std::size_t arity) : src_(src), arity_(arity) {}

  NodePtr parse_all() {
    skip_space();
    if (pos_ == src_.size()) fail("empty expression");
    NodePtr root = expr();
    skip_space();
    if (pos_ != src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw Error(Errc::syntax, msg + " at offset " + std::to_string(at), at);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == src_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("expression nested too deeply");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  NodePtr expr() {
    DepthGuard guard(*this);
    NodePtr lhs = term();
    while (true) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = build::binary(NodeKind::add, lhs, term(), at);
      } else if (accept('-')) {
        lhs = build::binary(NodeKind::subtract, lhs, term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (true) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = build::binary(NodeKind::multiply, lhs, factor(), at);
      } else if (accept('/')) {
        lhs = build::binary(NodeKind::divide, lhs, factor(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    DepthGuard guard(*this);
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return build::negate(factor(), at);
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return build::binary(NodeKind::power, base, factor(), at);
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ == src_.size()) fail("unexpected end of input");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail_at(std::string("unexpected '") + c + "'", at);
  }

  NodePtr number() {
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
    if (mantissa == 0) fail_at("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at("malformed exponent in number", start);
    }
    const auto value = detail::parse_double(src_.substr(start, pos_ - start));
    if (!value || !std::isfinite(*value)) fail_at("number out of range", start);
    return build::literal(*value, start);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name.size() == 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
      const auto index = static_cast<std::size_t>(name[1] - '0');
      if (index >= arity_) {
        throw Error(Errc::arity,
                    "variable " + std::string(name) + " at offset " + std::to_string(start) +
                        " exceeds arity " + std::to_string(arity_),
                    start);
      }
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '(') fail("variable cannot be called");
      return build::variable(index, start);
    }

    const auto fn = function_from_name(name);
    if (!fn) {
      if (name == "abs") {
        throw Error(Errc::unsupported,
                    "nondifferentiable branch 'abs' at offset " +
                        std::to_string(start) +
                        "; divided differences of |x| cannot be guaranteed near its breakpoint",
                    start);
      }
      throw Error(Errc::unknown_identifier,
                  "unknown identifier '" + std::string(name) + "' at offset " +
                      std::to_string(start),
                  start);
    }
    expect('(');
    NodePtr arg = expr();
    expect(')');
    return build::call(*fn, arg, start);
  }

  std::string_view src_;
  std::size_t arity_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

}  // namespace

Expr parse(std::string_view source, std::size_t arity) {
  if (arity > kMaxArity) {
    throw Error(Errc::arity, "arity may not exceed " + std::to_string(kMaxArity));
  }
  Parser p(source, arity);
  return Expr(p.parse_all(), arity);
}

}  // namespace cdd
