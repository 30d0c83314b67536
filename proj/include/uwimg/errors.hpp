#pragma once

#include <stdexcept>
#include <string>

namespace uwimg {

// Error categories map onto the CLI exit codes: usage 1, I/O 2, data/shape 3.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed content: unparsable metadata, bad file headers.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between paired rasters or vectors.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace uwimg
