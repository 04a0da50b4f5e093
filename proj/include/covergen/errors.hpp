#pragma once

#include <stdexcept>
#include <string>

namespace covergen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing, unreadable or malformed lexicon file. Message carries file:line.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Graph or run-store content that violates a structural invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied input rejected before any work is done.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a pure function was violated (shape, stochasticity, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

/// Backend could not be reached or answered with a non-protocol failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Backend answered, but the body does not match the wire contract.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& field, const std::string& what)
      : Error("protocol error at '" + field + "': " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class PersistenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace covergen
