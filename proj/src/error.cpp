#include "rwrs/error.hpp"

namespace rwrs {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPmf: return "InvalidPmf";
    case ErrorCode::NotCentered: return "NotCentered";
    case ErrorCode::SupportDoesNotGenerateZ: return "SupportDoesNotGenerateZ";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::UnknownStatistic: return "UnknownStatistic";
    case ErrorCode::ZeroReps: return "ZeroReps";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NonRationalModel: return "NonRationalModel";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::MissingComponents: return "MissingComponents";
    case ErrorCode::ObservableNotCentered: return "ObservableNotCentered";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyDirectory: return "EmptyDirectory";
  }
  return "Unknown";
}

}  // namespace rwrs
