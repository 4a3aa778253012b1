#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coac {

enum class ErrorCode {
    invalid_argument,
    length_mismatch,
    bad_shape,
    rank_deficient,
    order_exceeds_data,
    order_exceeds_kernel,
    nonpositive_variance,
    nonpositive_epsilon,
    insufficient_samples,
    kappa_domain,
    not_reached,
    fold_too_small,
    parse_error,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the CLI) can map it to a stable exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::bad_shape: return "BadShape";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::order_exceeds_data: return "OrderExceedsData";
    case ErrorCode::order_exceeds_kernel: return "OrderExceedsKernel";
    case ErrorCode::nonpositive_variance: return "NonpositiveVariance";
    case ErrorCode::nonpositive_epsilon: return "NonpositiveEpsilon";
    case ErrorCode::insufficient_samples: return "InsufficientSamples";
    case ErrorCode::kappa_domain: return "KappaDomain";
    case ErrorCode::not_reached: return "NotReached";
    case ErrorCode::fold_too_small: return "FoldTooSmall";
    case ErrorCode::parse_error: return "ParseError";
    }
    return "Unknown";
}

} // namespace coac
