#include "expfiber/error.hpp"

namespace expfiber {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::BoundaryHit: return "BoundaryHit";
    case ErrorCode::BoundaryOrbit: return "BoundaryOrbit";
    case ErrorCode::InvalidBase: return "InvalidBase";
    case ErrorCode::PeriodMismatch: return "PeriodMismatch";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::ResourceBound: return "ResourceBound";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::PostsingularCollision: return "PostsingularCollision";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NotPeriodic: return "NotPeriodic";
    case ErrorCode::AttractingContradiction: return "AttractingContradiction";
    case ErrorCode::WrongBasin: return "WrongBasin";
    case ErrorCode::SeedDisagreement: return "SeedDisagreement";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::IOFailure: return "IOFailure";
    }
    return "Unknown";
}

} // namespace expfiber
