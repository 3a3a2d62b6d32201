#include "tme/errors.hpp"

namespace tme {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::DuplicateSlot: return "DuplicateSlot";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownSlot: return "UnknownSlot";
    case ErrorCode::InactiveNode: return "InactiveNode";
    case ErrorCode::InactiveFocus: return "InactiveFocus";
    case ErrorCode::AlreadyInactive: return "AlreadyInactive";
    case ErrorCode::HistoryUnderflow: return "HistoryUnderflow";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::MalformedSnapshot: return "MalformedSnapshot";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::MalformedOutput: return "MalformedOutput";
    case ErrorCode::OffScript: return "OffScript";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ClassificationFailed: return "ClassificationFailed";
    case ErrorCode::EmptyContext: return "EmptyContext";
    case ErrorCode::UnrecordedPrompt: return "UnrecordedPrompt";
    case ErrorCode::UnrecordedRequest: return "UnrecordedRequest";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::ApiError: return "ApiError";
    case ErrorCode::FixtureGap: return "FixtureGap";
    case ErrorCode::UsageError: return "UsageError";
    }
    return "Unknown";
}

} // namespace tme
