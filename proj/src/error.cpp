#include "crane/error.hpp"

namespace crane {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::StateOutOfDomain: return "StateOutOfDomain";
    case ErrorKind::SingularMassMatrix: return "SingularMassMatrix";
    case ErrorKind::MismatchedSampleTime: return "MismatchedSampleTime";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NearSingularH: return "NearSingularH";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace crane
