#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flda {

enum class ErrorKind {
  parse,      // malformed input file
  config,     // bad option, spec or argument value
  dimension,  // shape mismatch between operands
  numeric,    // singular system, non-finite objective, impossible observation
  io,         // filesystem failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  /// `line` is 1-based; 0 means the error is not tied to a line.
  ParseError(const std::string& source, std::size_t line, const std::string& what);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_dimension(const std::string& what);
[[noreturn]] void throw_numeric(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);

}  // namespace flda
