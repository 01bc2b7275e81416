#pragma once

#include <stdexcept>
#include <string>

namespace domsplit {

enum class ErrorCode {
    dimension_mismatch,
    zero_subspace,
    not_complemented,
    rank_deficient,
    not_injective,
    bound_not_applicable,
    cap_exceeded,
    horizon_exceeded,
    sample_mismatch,
    precondition,
    config,
    io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace domsplit
