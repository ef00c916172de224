#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace storypath {

/// Base of every error raised by the library. The three direct subclasses
/// map onto the CLI exit codes (config = 2, data = 3, solver = 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// corpus
class CorpusEmptyError : public DataError {
 public:
  using DataError::DataError;
};

// lsa
class EmptyVocabularyError : public DataError {
 public:
  using DataError::DataError;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations, double last_change)
      : SolverError(what), iterations_(iterations), last_change_(last_change) {}
  std::size_t iterations() const { return iterations_; }
  double last_change() const { return last_change_; }

 private:
  std::size_t iterations_;
  double last_change_;
};

// shapes and values
class DimensionMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class ShapeMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class IncompleteSetError : public DataError {
 public:
  using DataError::DataError;
};

class InvalidPermutationError : public DataError {
 public:
  using DataError::DataError;
};

class SizeLimitError : public SolverError {
 public:
  using SolverError::SolverError;
};

// embedding_io
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class VersionMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteError : public DataError {
 public:
  using DataError::DataError;
};

class DuplicatePairError : public DataError {
 public:
  using DataError::DataError;
};

class MissingPairError : public DataError {
 public:
  MissingPairError(std::string narrative_id, std::size_t paragraph)
      : DataError("missing embedding for (" + narrative_id + ", " + std::to_string(paragraph) + ")"),
        narrative_id_(std::move(narrative_id)),
        paragraph_(paragraph) {}
  const std::string& narrative_id() const { return narrative_id_; }
  std::size_t paragraph() const { return paragraph_; }

 private:
  std::string narrative_id_;
  std::size_t paragraph_;
};

}  // namespace storypath
