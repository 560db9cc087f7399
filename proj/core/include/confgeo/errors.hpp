#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace confgeo {

/// Base of every error raised by the library. `kind()` is the stable,
/// machine-readable name used in structured CLI output.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define CONFGEO_DEFINE_ERROR(Name, Base)                              \
  class Name : public Base {                                          \
   public:                                                            \
    using Base::Base;                                                 \
    const char* kind() const noexcept override { return #Name; }      \
  }

// Linear algebra.
CONFGEO_DEFINE_ERROR(DegenerateForm, Error);
CONFGEO_DEFINE_ERROR(DimensionMismatch, Error);

// Expression language.
CONFGEO_DEFINE_ERROR(UnknownIdentifier, Error);
CONFGEO_DEFINE_ERROR(ArityError, Error);
CONFGEO_DEFINE_ERROR(DomainError, Error);

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at position " + std::to_string(position) + ": " + message),
        position_(position) {}
  const char* kind() const noexcept override { return "SyntaxError"; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Light-cone model.
CONFGEO_DEFINE_ERROR(PointAtInfinity, Error);
CONFGEO_DEFINE_ERROR(InvalidParameter, Error);

// Hypersurface geometry.
CONFGEO_DEFINE_ERROR(IsotropicPoint, Error);
CONFGEO_DEFINE_ERROR(NullNormal, Error);
CONFGEO_DEFINE_ERROR(IsotropicDirection, Error);
CONFGEO_DEFINE_ERROR(SingularFrame, Error);

// Equivalence.
CONFGEO_DEFINE_ERROR(NotProportional, Error);
CONFGEO_DEFINE_ERROR(UmbilicalPoint, Error);
CONFGEO_DEFINE_ERROR(DegenerateConfiguration, Error);

/// A hypothesis of the rigidity theorem does not hold for the input, so no
/// verdict can be certified. Distinct from computational failure.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "HypothesisViolation"; }
};

CONFGEO_DEFINE_ERROR(DimensionTooSmall, HypothesisViolation);

class GridContainsUmbilics : public HypothesisViolation {
 public:
  GridContainsUmbilics(const std::string& message, std::vector<std::size_t> points)
      : HypothesisViolation(message), points_(std::move(points)) {}
  const char* kind() const noexcept override { return "GridContainsUmbilics"; }
  const std::vector<std::size_t>& points() const noexcept { return points_; }

 private:
  std::vector<std::size_t> points_;
};

#undef CONFGEO_DEFINE_ERROR

}  // namespace confgeo
