#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmu {

enum class ErrorKind {
    Io,
    MalformedRecord,
    MissingSection,
    DuplicateBusId,
    DuplicateSlack,
    MissingSlack,
    UnknownBusReference,
    InvalidBranch,
    InvalidBus,
    DisconnectedNetwork,
    NonConvergence,
    SingularSubmatrix,
    Infeasible,
    NoSolutionWithinK,
    SvdConvergenceFailure,
    InvalidArgument,
    Internal,
};

std::string_view to_string(ErrorKind kind);

/// Process exit status for a failed CLI run; one code per error family.
int exit_code(ErrorKind kind);

class PmuError : public std::runtime_error {
  public:
    PmuError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace pmu
