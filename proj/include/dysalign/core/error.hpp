#pragma once

#include <stdexcept>
#include <string>

namespace dysalign {

// Root of every error thrown by the library. Subclasses map one-to-one onto
// the CLI exit codes, so callers can switch on the dynamic type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input precondition violated by the caller (bad index, wrong range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Tensor/matrix dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file exists but its contents are malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DimensionOverflowError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Malformed or unknown configuration field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A computed quantity is NaN/inf where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace dysalign
