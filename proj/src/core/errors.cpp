#include "forge/errors.hpp"

namespace forge {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonImmersion: return "NonImmersion";
    case ErrorCode::DegenerateNormalFrame: return "DegenerateNormalFrame";
    case ErrorCode::NotHarmonic: return "NotHarmonic";
    case ErrorCode::NotMinimal: return "NotMinimal";
    case ErrorCode::NotIsothermal: return "NotIsothermal";
    case ErrorCode::NotHolomorphic: return "NotHolomorphic";
    case ErrorCode::PathDependent: return "PathDependent";
    case ErrorCode::UmbilicPoint: return "UmbilicPoint";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::NonPositiveHeight: return "NonPositiveHeight";
    case ErrorCode::ZeroCrossing: return "ZeroCrossing";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::ProfileMismatch: return "ProfileMismatch";
    case ErrorCode::HolomorphyViolation: return "HolomorphyViolation";
    case ErrorCode::NotACone: return "NotACone";
    case ErrorCode::AssociatedFamilyUnavailable: return "AssociatedFamilyUnavailable";
    case ErrorCode::AtCenter: return "AtCenter";
    case ErrorCode::NotRuled: return "NotRuled";
    case ErrorCode::NoCommonVertex: return "NoCommonVertex";
    case ErrorCode::GaussMapMismatch: return "GaussMapMismatch";
    case ErrorCode::NotConformal: return "NotConformal";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::UnpairedComplexEigenvalue: return "UnpairedComplexEigenvalue";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::SliceUnavailable: return "SliceUnavailable";
    case ErrorCode::MissingReports: return "MissingReports";
    case ErrorCode::MissingPair: return "MissingPair";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ResidualAboveThreshold: return "ResidualAboveThreshold";
    case ErrorCode::Unknown: return "Unknown";
  }
  return "Unknown";
}

}  // namespace forge
