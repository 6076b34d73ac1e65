#include "error.hpp"

namespace bgk {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Argument: return "ArgumentError";
    case ErrorCode::MorseViolation: return "MorseViolation";
    case ErrorCode::Configuration: return "ConfigurationError";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::Numerical: return "NumericalError";
    case ErrorCode::ClusterSeparation: return "ClusterSeparation";
    case ErrorCode::SpectrumHit: return "SpectrumHit";
    case ErrorCode::KappaDegenerate: return "KappaDegenerate";
    case ErrorCode::CertificateFailure: return "CertificateFailure";
    case ErrorCode::GapFailure: return "GapFailure";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::ConfigParse: return "ConfigParseError";
  }
  return "Error";
}

}  // namespace bgk
