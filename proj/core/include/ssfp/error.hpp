#pragma once

#include <stdexcept>
#include <string>

namespace ssfp {

/// Raised when instance data, ids, or model handles violate a structural rule.
/// `path()` names the offending field (e.g. "scenarios[1].groups[0]") when known.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message, std::string path = {})
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// An instance whose terminal groups cannot be connected at all.
class InfeasibleInstanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace ssfp
