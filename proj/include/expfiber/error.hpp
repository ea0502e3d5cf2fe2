#pragma once

#include <stdexcept>
#include <string>

namespace expfiber {

enum class ErrorCode {
    Precondition,
    Parse,
    BoundaryHit,
    BoundaryOrbit,
    InvalidBase,
    PeriodMismatch,
    DegreeTooSmall,
    ResourceBound,
    SearchExhausted,
    BranchCut,
    Divergence,
    PostsingularCollision,
    NewtonDivergence,
    NotPeriodic,
    AttractingContradiction,
    WrongBasin,
    SeedDisagreement,
    NotSimple,
    IOFailure,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace expfiber
