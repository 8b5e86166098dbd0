#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pollcast/bias_engine.hpp"
#include "pollcast/model.hpp"
#include "pollcast/vote.hpp"

namespace pollcast {

// Vote log field names. The log format fixes these regardless of the
// election ids in the registry.
inline constexpr std::string_view kFieldDevice = "device_id";
inline constexpr std::string_view kFieldPseudonym = "pseudonym";
inline constexpr std::string_view kFieldTimestamp = "ts";
inline constexpr std::string_view kFieldCurrent = "party_2015";
inline constexpr std::string_view kFieldPrior = "party_2013";
inline constexpr std::string_view kFieldRegion = "region";
inline constexpr std::string_view kFieldSeq = "seq";

struct LineError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

std::string to_string(const LineError& e);

struct VoteLogParse {
    std::vector<VoteRecord> records;
    std::vector<LineError> errors;
};

// Parses one JSON Lines record. With a registry, party codes must resolve
// (prior codes may also be the abstention code). Throws Error(parse).
VoteRecord parse_vote_line(std::string_view line, const PartyRegistry* registry);

// Total parser: bad lines become positioned errors and are skipped. Records
// without a "seq" field take their 1-based line number.
VoteLogParse parse_vote_log(std::istream& in, const PartyRegistry& registry);

// Single-line JSON with fields in a fixed order; seq written when non-zero.
std::string serialize_vote_record(const VoteRecord& record);

struct OfficialParse {
    OfficialResults results;
    std::vector<LineError> errors;
};

// CSV with header "party,votes,valid".
OfficialParse parse_official_results(std::istream& in, std::string election = {});

// JSON registry document. Throws Error(parse) on structural problems;
// semantic checks belong to validate_registry.
PartyRegistry parse_registry(std::istream& in);
PartyRegistry load_registry_file(const std::string& path);
OfficialResults load_official_file(const std::string& path, std::string election = {});

}  // namespace pollcast
