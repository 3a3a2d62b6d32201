#pragma once

#include <stdexcept>
#include <string>

namespace tme {

// Error taxonomy shared by all components. Every recoverable failure maps to
// one code so callers (and the CLI exit-code mapping) can dispatch on it.
enum class ErrorCode {
    DuplicateSlot,
    DanglingReference,
    UnknownSlot,
    InactiveNode,
    InactiveFocus,
    AlreadyInactive,
    HistoryUnderflow,
    NoMatch,
    CycleDetected,
    BudgetTooSmall,
    MalformedSnapshot,
    IntegrityError,
    MalformedOutput,
    OffScript,
    BackendUnavailable,
    ClassificationFailed,
    EmptyContext,
    UnrecordedPrompt,
    UnrecordedRequest,
    Transport,
    ApiError,
    FixtureGap,
    UsageError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace tme
