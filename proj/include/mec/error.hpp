#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mec {

enum class ErrorCode {
    Empty,
    NegativeMass,
    BadTotal,
    BadTolerance,
    ShrinkRequested,
    BadPartition,
    LengthMismatch,
    InfeasibleSplit,
    InternalInvariant,
    TooFewMarginals,
    AxisOutOfRange,
    InstanceTooLarge,
    ParseError,
};

std::string_view code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the
// CLI reports code_name() verbatim so scripts can match on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace mec
