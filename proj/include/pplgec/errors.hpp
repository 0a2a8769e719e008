#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pplgec {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: registry, corpus, model file, queries or parameters.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Error tied to a 1-based line number of an input stream.
class LineError : public DataError {
 public:
  LineError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MalformedRegistry : public LineError {
 public:
  using LineError::LineError;
};

class DuplicateWordInSet : public LineError {
 public:
  using LineError::LineError;
};

class EmptySet : public DataError {
 public:
  using DataError::DataError;
};

class UnknownErrorType : public DataError {
 public:
  using DataError::DataError;
};

class MalformedRow : public LineError {
 public:
  using LineError::LineError;
};

class AnswerNotInConfusionSet : public LineError {
 public:
  using LineError::LineError;
};

class MissingOrMultipleMaskSlot : public LineError {
 public:
  using LineError::LineError;
};

class EmptyTrainingData : public DataError {
 public:
  using DataError::DataError;
};

class InvalidQuery : public DataError {
 public:
  using DataError::DataError;
};

/// A sequence exceeds the oracle's advertised max_tokens.
class SequenceTooLong : public DataError {
 public:
  using DataError::DataError;
};

class AlphaOutOfRange : public DataError {
 public:
  using DataError::DataError;
};

class SlotOutOfRange : public DataError {
 public:
  using DataError::DataError;
};

class EmptyCorpus : public DataError {
 public:
  using DataError::DataError;
};

/// The remote oracle could not be reached or answered with garbage.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace pplgec
