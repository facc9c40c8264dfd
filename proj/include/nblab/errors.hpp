#pragma once

#include <stdexcept>
#include <string>

namespace nblab {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  domain,      // argument outside the mathematical domain
  resource,    // work budget exhausted before reaching the requested tolerance
  capability,  // method not available for this input
  data,        // malformed or non-finite data
  contract,    // caller-side contract violated (e.g. independence flag)
  range,       // overflow of an intermediate quantity
  pole,        // evaluation at a pole
  io           // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error(ErrorKind::capability, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::range, what) {}
};

class PoleError : public Error {
 public:
  explicit PoleError(const std::string& what) : Error(ErrorKind::pole, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Work budget exceeded. `achievable` is the tightest tolerance the budget allows.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, double achievable)
      : Error(ErrorKind::resource, what), achievable_(achievable) {}
  double achievable() const noexcept { return achievable_; }

 private:
  double achievable_;
};

}  // namespace nblab
