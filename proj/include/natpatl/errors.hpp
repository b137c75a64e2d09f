#pragma once

#include <stdexcept>
#include <string>

namespace natpatl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model validation
struct ModelError : Error { using Error::Error; };
struct EmptyLegalityError : ModelError { using ModelError::ModelError; };
struct UnnormalizedDistributionError : ModelError { using ModelError::ModelError; };
struct TransitionForIllegalProfileError : ModelError { using ModelError::ModelError; };
struct DanglingStateReferenceError : ModelError { using ModelError::ModelError; };
struct IllegalProfileError : ModelError { using ModelError::ModelError; };

// Parsing
struct SyntaxError : Error {
    SyntaxError(const std::string& msg, std::size_t pos)
        : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};
struct UnknownAgentError : Error { using Error::Error; };
struct UnknownAtomError : Error { using Error::Error; };
struct ThresholdOutOfRangeError : Error { using Error::Error; };

// Strategies
struct InvalidStrategyError : Error { using Error::Error; };
struct NoMatchError : InvalidStrategyError { using InvalidStrategyError::InvalidStrategyError; };
struct VocabularyEmptyError : Error { using Error::Error; };

// Products / checking
struct StrategyAgentMismatchError : Error { using Error::Error; };
struct MissingAgentStrategyError : Error { using Error::Error; };
struct NotPositiveFragmentError : Error { using Error::Error; };
struct UnknownVerdictError : Error { using Error::Error; };
struct BodyNotNatPatlError : Error { using Error::Error; };

// Solvers / automata
struct NonConvergenceError : Error { using Error::Error; };
struct StateBudgetExceededError : Error {
    StateBudgetExceededError(const std::string& msg, std::size_t lim)
        : Error(msg), limit(lim) {}
    std::size_t limit;
};

}  // namespace natpatl
