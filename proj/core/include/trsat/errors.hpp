#pragma once

#include <stdexcept>
#include <string>

namespace trsat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, rationals, words).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally inconsistent objects: dimension mismatches, bad relations.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Run-time arithmetic failure, e.g. division by zero.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace trsat
