#pragma once

#include <stdexcept>
#include <string>

namespace isty {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A region (e.g. occluded pixels for masked PSNR) is empty.
class UndefinedRegionError : public Error {
 public:
  using Error::Error;
};

/// Raised by training when a loss or gradient stops being finite.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::string tensor, const std::string& what)
      : Error(what), tensor_(std::move(tensor)) {}
  const std::string& tensor() const noexcept { return tensor_; }

 private:
  std::string tensor_;
};

}  // namespace isty
