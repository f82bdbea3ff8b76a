#include "ccep/error.hpp"

namespace ccep {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::TooFewPeriods: return "TooFewPeriods";
    case ErrorKind::TooManyProxies: return "TooManyProxies";
    case ErrorKind::UnbalancedPanel: return "UnbalancedPanel";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::DuplicateObservation: return "DuplicateObservation";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace ccep
