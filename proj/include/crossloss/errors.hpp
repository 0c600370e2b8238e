#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crossloss {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample of the wrong kind was handed to an objective.
class SampleTypeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf results, failed factorizations, zero-norm vectors.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// LiSSA iterate blew up, or a trainer produced a non-finite loss.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A quantity is undefined for the given input (zero variance, singleton clusters).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Bad argument or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message carries the location.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// One or more words are missing from the vocabulary.
class VocabError : public Error {
 public:
  VocabError(const std::string& what, std::vector<std::string> words)
      : Error(what), words_(std::move(words)) {}

  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  std::vector<std::string> words_;
};

}  // namespace crossloss
