#pragma once

#include <stdexcept>
#include <string>

namespace nqsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values: non-unit axes, out-of-range transmissivities, ...
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Operator/state shape mismatches and label clashes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class LadderOverflow : public Error {
 public:
  using Error::Error;
};

class AbsorbedBeam : public Error {
 public:
  AbsorbedBeam() : Error("fully absorbed beam") {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace nqsim
