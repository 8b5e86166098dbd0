#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pollcast/model.hpp"

namespace pollcast {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// ISO-8601 UTC. Whole seconds print without a fraction.
std::string format_timestamp(Timestamp ts);
// Accepts YYYY-MM-DD and YYYY-MM-DDTHH:MM[:SS[.fff]](Z|±HH:MM).
std::optional<Timestamp> parse_timestamp(std::string_view text);

// One vote event. prior_party holds a prior-election party code, the
// registry abstention code, or nothing when undisclosed.
struct VoteRecord {
    std::string device_id;
    Timestamp timestamp{};
    PartyCode current_party;
    std::optional<PartyCode> prior_party;
    std::optional<std::string> region;
    // Storage order, assigned at append time; ties on timestamp go to the higher value.
    std::uint64_t seq = 0;

    friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

// Strict "later than" used by dedup: timestamp first, then sequence number.
inline bool supersedes(const VoteRecord& a, const VoteRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
    return a.seq > b.seq;
}

}  // namespace pollcast
