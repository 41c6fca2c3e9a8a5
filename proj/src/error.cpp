#include "pmu/error.hpp"

namespace pmu {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "Io";
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::MissingSection: return "MissingSection";
        case ErrorKind::DuplicateBusId: return "DuplicateBusId";
        case ErrorKind::DuplicateSlack: return "DuplicateSlack";
        case ErrorKind::MissingSlack: return "MissingSlack";
        case ErrorKind::UnknownBusReference: return "UnknownBusReference";
        case ErrorKind::InvalidBranch: return "InvalidBranch";
        case ErrorKind::InvalidBus: return "InvalidBus";
        case ErrorKind::DisconnectedNetwork: return "DisconnectedNetwork";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::SingularSubmatrix: return "SingularSubmatrix";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::NoSolutionWithinK: return "NoSolutionWithinK";
        case ErrorKind::SvdConvergenceFailure: return "SvdConvergenceFailure";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Internal: return "Internal";
    }
    return "Internal";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return 2;
        case ErrorKind::Io: return 3;
        case ErrorKind::MalformedRecord:
        case ErrorKind::MissingSection: return 4;
        case ErrorKind::DuplicateBusId:
        case ErrorKind::DuplicateSlack:
        case ErrorKind::MissingSlack:
        case ErrorKind::UnknownBusReference:
        case ErrorKind::InvalidBranch:
        case ErrorKind::InvalidBus:
        case ErrorKind::DisconnectedNetwork: return 5;
        case ErrorKind::NonConvergence: return 6;
        case ErrorKind::SingularSubmatrix: return 7;
        case ErrorKind::Infeasible:
        case ErrorKind::NoSolutionWithinK: return 8;
        case ErrorKind::SvdConvergenceFailure: return 9;
        case ErrorKind::Internal: return 10;
    }
    return 10;
}

}  // namespace pmu
