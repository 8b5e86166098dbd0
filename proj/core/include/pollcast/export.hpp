#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pollcast/vote.hpp"

namespace pollcast {

enum class TimeGranularity { second, minute, hour, day };

std::optional<TimeGranularity> parse_granularity(std::string_view text);

struct ExportOptions {
    TimeGranularity granularity = TimeGranularity::day;
    // Empty salt: a random one is drawn for this export.
    std::string salt;
    // Region codes are '/'-separated paths ("IL-TA/Tel-Aviv"); keep this many
    // leading components. 0 drops regions, negative keeps them whole.
    int region_depth = 1;
};

// Salted one-way pseudonym (HMAC-SHA256, 128-bit hex prefix).
std::string pseudonymize(std::string_view device_id, std::string_view salt);

Timestamp truncate_timestamp(Timestamp ts, TimeGranularity granularity);
std::optional<std::string> coarsen_region(const std::optional<std::string>& region, int depth);

// Writes one JSON line per event with device ids replaced by pseudonyms,
// timestamps truncated and regions coarsened. Events are emitted in the
// order latest-vote dedup sees them (timestamp, then storage seq) and
// renumbered from 1, so dedup on the export agrees with the original.
// Returns the number of lines written.
std::size_t export_obfuscated(std::span<const VoteRecord> events, const ExportOptions& options, std::ostream& out);

}  // namespace pollcast
