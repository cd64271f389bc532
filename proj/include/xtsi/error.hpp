#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xtsi {

/// Base for every error raised by the library. Callers that only need a
/// message can catch this; the subclasses name the failure category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
  using Error::Error;
};
class CoverageError : public Error {
  using Error::Error;
};
class AlignmentError : public Error {
  using Error::Error;
};
class ParameterError : public Error {
  using Error::Error;
};
class DegenerateError : public Error {
  using Error::Error;
};
class DecompositionError : public Error {
  using Error::Error;
};
class DomainError : public Error {
  using Error::Error;
};
class ConfigurationError : public Error {
  using Error::Error;
};
class PreconditionError : public Error {
  using Error::Error;
};
class ConsistencyError : public Error {
  using Error::Error;
};
class SizeError : public Error {
  using Error::Error;
};

}  // namespace xtsi
