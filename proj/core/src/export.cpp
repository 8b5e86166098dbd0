#include "pollcast/export.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include "pollcast/error.hpp"
#include "pollcast/ingest.hpp"

namespace pollcast {

std::optional<TimeGranularity> parse_granularity(std::string_view text) {
    if (text == "second") return TimeGranularity::second;
    if (text == "minute") return TimeGranularity::minute;
    if (text == "hour") return TimeGranularity::hour;
    if (text == "day") return TimeGranularity::day;
    return std::nullopt;
}

std::string pseudonymize(std::string_view device_id, std::string_view salt) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
              reinterpret_cast<const unsigned char*>(device_id.data()), device_id.size(), digest, &len))
        throw Error(ErrorCode::invalid_argument, "pseudonym hashing failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < 16 && i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

Timestamp truncate_timestamp(Timestamp ts, TimeGranularity granularity) {
    using namespace std::chrono;
    switch (granularity) {
    case TimeGranularity::second: return floor<seconds>(ts);
    case TimeGranularity::minute: return floor<minutes>(ts);
    case TimeGranularity::hour: return floor<hours>(ts);
    case TimeGranularity::day: return floor<days>(ts);
    }
    return ts;
}

std::optional<std::string> coarsen_region(const std::optional<std::string>& region, int depth) {
    if (!region || depth < 0) return region;
    if (depth == 0) return std::nullopt;
    std::size_t pos = 0;
    for (int k = 0; k < depth; ++k) {
        pos = region->find('/', pos);
        if (pos == std::string::npos) return region;
        if (k + 1 < depth) ++pos;
    }
    return region->substr(0, pos);
}

namespace {

std::string random_salt() {
    unsigned char bytes[16];
    if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error(ErrorCode::invalid_argument, "no randomness for salt");
    return std::string(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

}  // namespace

std::size_t export_obfuscated(std::span<const VoteRecord> events, const ExportOptions& options, std::ostream& out) {
    const auto salt = options.salt.empty() ? random_salt() : options.salt;

    std::vector<const VoteRecord*> order;
    order.reserve(events.size());
    for (const auto& e : events) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(),
                     [](const VoteRecord* a, const VoteRecord* b) { return supersedes(*b, *a); });

    std::uint64_t seq = 0;
    for (const auto* e : order) {
        nlohmann::ordered_json obj;
        obj[std::string(kFieldPseudonym)] = pseudonymize(e->device_id, salt);
        const auto ts = truncate_timestamp(e->timestamp, options.granularity);
        obj[std::string(kFieldTimestamp)] =
            options.granularity == TimeGranularity::day ? format_timestamp(ts).substr(0, 10) : format_timestamp(ts);
        obj[std::string(kFieldCurrent)] = e->current_party;
        obj[std::string(kFieldPrior)] = e->prior_party ? nlohmann::json(*e->prior_party) : nlohmann::json(nullptr);
        const auto region = coarsen_region(e->region, options.region_depth);
        obj[std::string(kFieldRegion)] = region ? nlohmann::json(*region) : nlohmann::json(nullptr);
        obj[std::string(kFieldSeq)] = ++seq;
        out << obj.dump() << '\n';
    }
    return static_cast<std::size_t>(seq);
}

}  // namespace pollcast
