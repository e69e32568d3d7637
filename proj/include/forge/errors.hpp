#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Numeric values are part of the C API (see forge.h) and must stay stable.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  DimensionMismatch = 2,
  NonImmersion = 3,
  DegenerateNormalFrame = 4,
  NotHarmonic = 5,
  NotMinimal = 6,
  NotIsothermal = 7,
  NotHolomorphic = 8,
  PathDependent = 9,
  UmbilicPoint = 10,
  NotIntegrable = 11,
  NonPositiveHeight = 12,
  ZeroCrossing = 13,
  DomainViolation = 14,
  ProfileMismatch = 15,
  HolomorphyViolation = 16,
  NotACone = 17,
  AssociatedFamilyUnavailable = 18,
  AtCenter = 19,
  NotRuled = 20,
  NoCommonVertex = 21,
  GaussMapMismatch = 22,
  NotConformal = 23,
  NotOrthogonal = 24,
  UnpairedComplexEigenvalue = 25,
  NotClosed = 26,
  UnknownExample = 27,
  SliceUnavailable = 28,
  MissingReports = 29,
  MissingPair = 30,
  IoError = 31,
  ParseError = 32,
  ResidualAboveThreshold = 33,
  Unknown = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace forge
