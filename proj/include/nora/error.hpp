#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nora {

enum class ErrorKind {
  InvalidInput,   // malformed or out-of-range input, validation failures
  Unauthorized,   // missing/expired token, bad credentials
  Forbidden,      // caller may not act on the resource
  NotFound,
  Conflict,       // version mismatch, duplicate session, alias taken
  InvalidState,   // operation not allowed in the current phase
  Unprocessable,  // parse errors, no-match, incompatible distributions
  Upstream,       // external provider failed
};

inline constexpr std::string_view to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::Unauthorized: return "unauthorized";
    case ErrorKind::Forbidden: return "forbidden";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::InvalidState: return "invalid_state";
    case ErrorKind::Unprocessable: return "unprocessable";
    case ErrorKind::Upstream: return "upstream";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by file loaders; line is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Unprocessable,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace nora
