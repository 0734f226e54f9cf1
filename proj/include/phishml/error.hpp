#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phishml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input data. Row and column are 1-based
/// positions in the source file (row 1 is the header); 0 means "not
/// applicable".
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::size_t column = 0);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Invalid classifier / kernel / run configuration.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during training (non-finite loss, divergence).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace phishml
