#include "flda/error.hpp"

namespace flda {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse:
      return "parse";
    case ErrorKind::config:
      return "config";
    case ErrorKind::dimension:
      return "dimension";
    case ErrorKind::numeric:
      return "numeric";
    case ErrorKind::io:
      return "io";
  }
  return "error";
}

namespace {

std::string locate(const std::string& source, std::size_t line, const std::string& what) {
  std::string out = source;
  if (line > 0) {
    out += ":" + std::to_string(line);
  }
  return out.empty() ? what : out + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(ErrorKind::parse, locate(source, line, what)), line_(line) {}

void throw_config(const std::string& what) { throw Error(ErrorKind::config, what); }
void throw_dimension(const std::string& what) { throw Error(ErrorKind::dimension, what); }
void throw_numeric(const std::string& what) { throw Error(ErrorKind::numeric, what); }
void throw_io(const std::string& what) { throw Error(ErrorKind::io, what); }

}  // namespace flda
