#pragma once

#include <stdexcept>
#include <string>

#include "sagbihom/polynomial.hpp"

namespace sagbihom {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset(offset),
        message(msg) {}
  std::size_t offset;
  std::string message;
};

/// Parse an expression over `+ - * ^` with parentheses, integer/decimal/
/// rational literals and the context's variable names. Implicit
/// multiplication is a syntax error.
QPoly parse_polynomial(const std::string& text, const CtxPtr& ctx);

}  // namespace sagbihom
