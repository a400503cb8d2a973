#pragma once

#include <stdexcept>
#include <string>

namespace metaimpact {

/// Malformed or inconsistent input data (maps to exit code 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required input file does not exist or cannot be opened.
class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(const std::string& path)
      : std::runtime_error("input file not found: " + path), path_(path) {}
  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Operation precondition not met, typically too little data (exit code 3).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No quote prevails at the requested time.
class NoQuoteError : public std::runtime_error {
 public:
  NoQuoteError() : std::runtime_error("NoQuote") {}
};

}  // namespace metaimpact
