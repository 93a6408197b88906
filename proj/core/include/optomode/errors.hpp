#pragma once

#include <stdexcept>
#include <string>

namespace optomode {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the documented domain of an operation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed: no root, singular system, degenerate basis.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A time-domain integration diverged. Carries the mode and quadrature that grew.
class InstabilityError : public NumericalError {
 public:
  InstabilityError(const std::string& what, int mode, std::string quadrature)
      : NumericalError(what), mode_(mode), quadrature_(std::move(quadrature)) {}

  int mode() const { return mode_; }
  const std::string& quadrature() const { return quadrature_; }

 private:
  int mode_;
  std::string quadrature_;
};

}  // namespace optomode
