#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synthts {

/// Broad failure class; the CLI maps each to an exit code.
enum class ErrorCategory { Config, Io, Data };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define SYNTHTS_DEFINE_ERROR(Name, Category)                 \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what)                   \
        : Error(ErrorCategory::Category, #Name ": " + what) {} \
  }

SYNTHTS_DEFINE_ERROR(ConfigError, Config);
SYNTHTS_DEFINE_ERROR(WriteError, Io);
SYNTHTS_DEFINE_ERROR(ReadError, Io);
SYNTHTS_DEFINE_ERROR(StreamClosed, Io);
SYNTHTS_DEFINE_ERROR(InvalidSeries, Data);
SYNTHTS_DEFINE_ERROR(InvalidWindow, Data);
SYNTHTS_DEFINE_ERROR(ShapeMismatch, Data);
SYNTHTS_DEFINE_ERROR(SchemaViolation, Data);
SYNTHTS_DEFINE_ERROR(DecodeError, Data);
SYNTHTS_DEFINE_ERROR(BandInfeasible, Data);
SYNTHTS_DEFINE_ERROR(EmptyIngest, Data);

#undef SYNTHTS_DEFINE_ERROR

/// Malformed numeric input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::Data, "ParseError: line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace synthts
