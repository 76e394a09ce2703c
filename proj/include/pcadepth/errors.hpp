#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcadepth {

/// Base class for recoverable library errors (bad data, bad files, bad
/// configuration). Programming-contract violations throw the standard
/// exceptions instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested more basis columns than the training corpus supports.
class RankError : public Error {
 public:
  RankError(const std::string& what, std::int64_t achievable)
      : Error(what), achievable_(achievable) {}

  /// Largest k the corpus can actually deliver.
  std::int64_t achievable() const noexcept { return achievable_; }

 private:
  std::int64_t achievable_;
};

}  // namespace pcadepth
