#include "pollcast/error.hpp"

namespace pollcast {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::empty_electorate: return "empty_electorate";
    case ErrorCode::insufficient_prior_data: return "insufficient_prior_data";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::missing_official: return "missing_official";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::storage: return "storage_unavailable";
    case ErrorCode::corrupt_storage: return "corrupt_storage";
    }
    return "unknown";
}

}  // namespace pollcast
