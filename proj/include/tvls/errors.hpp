#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tvls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A model or report file could not be decoded. `field` names the offending
/// JSON path, e.g. "A[1][0].params".
class ModelFormatError : public PreconditionError {
 public:
  ModelFormatError(std::string field, const std::string& what)
      : PreconditionError(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// The Peano-Baker series did not reach its tolerance within the term budget.
class DivergenceError : public PreconditionError {
 public:
  DivergenceError(const std::string& what, std::vector<double> term_norms)
      : PreconditionError(what), term_norms_(std::move(term_norms)) {}

  const std::vector<double>& term_norms() const { return term_norms_; }

 private:
  std::vector<double> term_norms_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace tvls
