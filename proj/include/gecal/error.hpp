#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gecal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(line ? "line " + std::to_string(line) + ": " + reason : reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Failure talking to a GEC backend. Retriable errors are transport-level
/// (connection refused, timeout, 5xx); everything else is fatal.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, bool retriable)
      : Error(what), retriable_(retriable) {}
  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

/// The backend answered but violated the wire contract.
class ProtocolError : public OracleError {
 public:
  explicit ProtocolError(const std::string& what) : OracleError(what, false) {}
};

}  // namespace gecal
