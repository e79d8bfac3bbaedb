#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace aqnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input failed validation. `fields` maps a field name to what is wrong with it.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::map<std::string, std::string> fields = {})
      : Error(message), fields_(std::move(fields)) {}

  const std::map<std::string, std::string>& fields() const noexcept { return fields_; }

 private:
  std::map<std::string, std::string> fields_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqnet
