#pragma once

#include <stdexcept>
#include <string>

namespace slotshot {

// Input violates a data contract (bad record, precondition, invariant).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTemplateError : public DataError {
 public:
  using DataError::DataError;
};

class InvalidScoresError : public DataError {
 public:
  using DataError::DataError;
};

class LengthMismatchError : public DataError {
 public:
  using DataError::DataError;
};

// Failures talking to a scorer. Distinct subclasses per failure mode.
class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScorerTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class MalformedResponseError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

class ResponseLengthError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

}  // namespace slotshot
