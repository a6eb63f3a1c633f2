#include "luequiv/error.hpp"

namespace luequiv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotUnitTrace: return "NotUnitTrace";
        case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::PatternMismatch: return "PatternMismatch";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::GramSingular: return "GramSingular";
        case ErrorCode::NotInSpan: return "NotInSpan";
        case ErrorCode::NoIntertwiner: return "NoIntertwiner";
        case ErrorCode::NoNonsingularElement: return "NoNonsingularElement";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace luequiv
