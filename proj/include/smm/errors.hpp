#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input validation failure that should surface as a usage/IO error.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownToken : public Error {
 public:
  UnknownToken(std::size_t position, std::string token)
      : Error("unknown token '" + token + "' at position " +
              std::to_string(position)),
        position_(position),
        token_(std::move(token)) {}
  std::size_t position() const { return position_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t position_;
  std::string token_;
};

class SequenceTooShort : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class EmptyGroup : public Error {
 public:
  using Error::Error;
};

class MismatchedElements : public Error {
 public:
  using Error::Error;
};

class UndefinedBound : public Error {
 public:
  using Error::Error;
};

class SingleCluster : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class MalformedFasta : public Error {
 public:
  MalformedFasta(std::size_t line, const std::string& what)
      : Error("malformed FASTA at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace smm
