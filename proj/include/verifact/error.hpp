#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace verifact {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
  public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class DuplicateKeyError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

class BindingError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Outbound call failed after all retries. `status()` is the last HTTP status, 0 when
/// the connection itself failed.
class TransportError : public Error {
  public:
    TransportError(int status, const std::string& what) : Error(what), status_(status) {}
    int status() const noexcept { return status_; }

  private:
    int status_;
};

/// LLM reply carried no recognizable label. The raw reply is kept verbatim.
class UnparseableResponse : public Error {
  public:
    explicit UnparseableResponse(std::string raw)
        : Error("unparseable LLM response: " + raw.substr(0, 80)), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

  private:
    std::string raw_;
};

}  // namespace verifact
