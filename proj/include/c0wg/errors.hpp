#pragma once

#include <stdexcept>
#include <string>

namespace c0wg {

/// Error categories surfaced by the library. The CLI maps each category to a
/// distinct nonzero exit code.
enum class ErrorKind {
  parse = 2,
  structural = 3,
  capability = 4,
  conditioning = 5,
  not_spd = 6,
  convergence = 7,
  invariant = 8,
  config = 9,
  dimension = 10,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::structural: return "structural error";
    case ErrorKind::capability: return "capability error";
    case ErrorKind::conditioning: return "conditioning error";
    case ErrorKind::not_spd: return "not-SPD error";
    case ErrorKind::convergence: return "convergence error";
    case ErrorKind::invariant: return "invariant violation";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::dimension: return "dimension mismatch";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace c0wg
