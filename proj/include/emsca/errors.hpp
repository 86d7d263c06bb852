#ifndef EMSCA_ERRORS_HPP
#define EMSCA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emsca {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: framing, bands, synthesis configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Inputs that are well formed but unusable (non-finite samples, mismatched sets).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Bytes that are not an EMTS stream.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace emsca

#endif  // EMSCA_ERRORS_HPP
