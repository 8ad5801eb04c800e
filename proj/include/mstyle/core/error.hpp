#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mstyle {

/// Error categories raised by the library. The CLI maps each category onto an
/// exit code through exit_code_for().
enum class Errc {
  validation,
  parse,
  lookup,
  precondition,
  missing_key,
  conflict,
  not_found,
  insufficient_annotation,
  alignment,
  calibration,
  sampling,
  undefined_retention,
  io,
  transport,
  protocol,
  domain,
  shape,
  numeric,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::validation: return "validation";
    case Errc::parse: return "parse";
    case Errc::lookup: return "lookup";
    case Errc::precondition: return "precondition";
    case Errc::missing_key: return "missing_key";
    case Errc::conflict: return "conflict";
    case Errc::not_found: return "not_found";
    case Errc::insufficient_annotation: return "insufficient_annotation";
    case Errc::alignment: return "alignment";
    case Errc::calibration: return "calibration";
    case Errc::sampling: return "sampling";
    case Errc::undefined_retention: return "undefined_retention";
    case Errc::io: return "io";
    case Errc::transport: return "transport";
    case Errc::protocol: return "protocol";
    case Errc::domain: return "domain";
    case Errc::shape: return "shape";
    case Errc::numeric: return "numeric";
  }
  return "unknown";
}

/// 0 success, 1 validation, 2 I/O, 3 numeric/domain.
constexpr int exit_code_for(Errc c) noexcept {
  switch (c) {
    case Errc::io:
    case Errc::transport:
    case Errc::protocol:
      return 2;
    case Errc::domain:
    case Errc::shape:
    case Errc::numeric:
      return 3;
    default:
      return 1;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A parse failure that keeps the offending input for auditing.
class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& message, std::string raw)
      : Error(Errc::parse, message), raw_(std::move(raw)) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, Errc code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace mstyle
