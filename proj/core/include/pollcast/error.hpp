#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pollcast {

enum class ErrorCode {
    invalid_argument,
    not_found,
    empty_electorate,
    insufficient_prior_data,
    dimension_mismatch,
    missing_official,
    parse,
    storage,          // retryable
    corrupt_storage,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    bool retryable() const noexcept { return code_ == ErrorCode::storage; }

private:
    ErrorCode code_;
};

}  // namespace pollcast
