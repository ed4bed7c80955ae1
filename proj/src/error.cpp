#include "gaitkb/error.hpp"

namespace gaitkb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTrial: return "InvalidTrial";
    case ErrorCode::InvalidPatientMeta: return "InvalidPatientMeta";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::NoSteps: return "NoSteps";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Duplicate: return "Duplicate";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::PersistenceError: return "PersistenceError";
    case ErrorCode::VersionError: return "VersionError";
  }
  return "Unknown";
}

}  // namespace gaitkb
