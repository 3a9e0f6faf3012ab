#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orlicz {

enum class ErrorKind {
  invariant_violation,
  resolution,
  domain,
  shape,
  not_applicable,
  consistency,
  hypothesis,
  length,
  registry,
  parse,
  input,
  convexity_violation,
  representation_violation,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invariant_violation: return "invariant_violation";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::domain: return "domain";
    case ErrorKind::shape: return "shape";
    case ErrorKind::not_applicable: return "not_applicable";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::length: return "length";
    case ErrorKind::registry: return "registry";
    case ErrorKind::parse: return "parse";
    case ErrorKind::input: return "input";
    case ErrorKind::convexity_violation: return "convexity_violation";
    case ErrorKind::representation_violation: return "representation_violation";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` distinguishes failure classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}
}  // namespace detail

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace orlicz
