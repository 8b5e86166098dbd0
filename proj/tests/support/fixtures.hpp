#pragma once

// Shared fixtures for unit and acceptance tests.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pollcast/bias_engine.hpp"
#include "pollcast/model.hpp"
#include "pollcast/vote.hpp"

namespace pollcast::testing {

inline Timestamp at_seconds(std::int64_t s) {
    return Timestamp{std::chrono::milliseconds{s * 1000}};
}

// 2015-03-16T00:00:00Z
inline Timestamp base_time() {
    using namespace std::chrono;
    return Timestamp{sys_days{year{2015} / 3 / 16}};
}

// The twelve 2015 lists and a 2013 election
// with the parties behind the four sectorial groups.
inline PartyRegistry knesset_registry() {
    PartyRegistry r;
    r.elections = {{"2013", ElectionRole::prior, 120, Fraction(2, 100)},
                   {"2015", ElectionRole::current, 120, Fraction(325, 10000)}};
    for (const char* c : {"LIKUD_BEYTENU", "YESH_ATID", "LABOR", "BAYIT_YEHUDI", "SHAS", "UTJ", "HATNUAH", "MERETZ",
                          "RAAM_TAAL", "HADASH", "BALAD", "KADIMA", "OTZMA", "AM_SHALEM", "ALE_YAROK"})
        r.parties.push_back({c, "2013", c, {}});
    for (const char* c : {"ZIONIST_UNION", "LIKUD", "YESH_ATID", "BAYIT_YEHUDI", "YACHAD", "MERETZ", "ARAB_UNION",
                          "KULANU", "ALE_YAROK", "SHAS", "UTJ", "ISRAEL_BEYTENU"})
        r.parties.push_back({c, "2015", c, {}});
    r.fixed_groups = {
        {"AY", {"ALE_YAROK"}, {"ALE_YAROK"}},
        {"YH", {"UTJ"}, {"UTJ"}},
        {"AU", {"HADASH", "BALAD", "RAAM_TAAL"}, {"ARAB_UNION"}},
        {"S", {"SHAS", "AM_SHALEM", "OTZMA"}, {"SHAS", "YACHAD"}},
    };
    return r;
}

// Illustrative prior-election counts (integers, not a historical record).
inline OfficialResults knesset_official() {
    OfficialResults o;
    o.election = "2013";
    o.rows = {{"LIKUD_BEYTENU", 885163, true}, {"YESH_ATID", 543458, true}, {"LABOR", 432118, true},
              {"BAYIT_YEHUDI", 345985, true},  {"SHAS", 331868, true},      {"UTJ", 195892, true},
              {"HATNUAH", 189167, true},       {"MERETZ", 172403, true},    {"RAAM_TAAL", 138450, true},
              {"HADASH", 113439, true},        {"BALAD", 97030, true},      {"KADIMA", 78974, true},
              {"OTZMA", 66775, true},          {"AM_SHALEM", 45690, true},  {"ALE_YAROK", 43734, true},
              {"INVALID", 40000, false}};
    return o;
}

struct LogShape {
    int devices = 200;
    int events = 600;
    double prior_disclosure = 0.7;   // probability an event carries a prior vote
    double abstention = 0.05;        // share of disclosures that are abstentions
    double region_rate = 0.5;
    int time_span_seconds = 86400 * 30;
    int tie_span = 0;                // >0 draws timestamps from few values to force ties
};

// Random log over the registry's parties with repeat votes per device.
// Sequence numbers are 1..events in storage order.
inline std::vector<VoteRecord> random_log(const PartyRegistry& reg, std::mt19937_64& rng, const LogShape& shape = {}) {
    const auto current = reg.codes_of(reg.current_election().id);
    const auto prior = reg.codes_of(reg.prior_election().id);
    const std::vector<std::string> regions = {"IL-JM", "IL-TA", "IL-HA", "IL-Z/Nazareth", "IL-M", "IL-D/Beersheba"};
    std::uniform_int_distribution<int> device(0, std::max(0, shape.devices - 1));
    std::uniform_int_distribution<std::size_t> cur(0, current.size() - 1), pri(0, prior.size() - 1),
        reg_pick(0, regions.size() - 1);
    std::uniform_int_distribution<int> when(0, shape.tie_span > 0 ? shape.tie_span : shape.time_span_seconds);
    std::bernoulli_distribution disclose(shape.prior_disclosure), abstain(shape.abstention),
        has_region(shape.region_rate);

    std::vector<VoteRecord> log;
    for (int i = 0; i < shape.events; ++i) {
        VoteRecord r;
        r.device_id = "dev-" + std::to_string(device(rng));
        r.timestamp = base_time() + std::chrono::seconds{when(rng)};
        r.current_party = current[cur(rng)];
        if (disclose(rng)) r.prior_party = abstain(rng) ? reg.abstention_code : prior[pri(rng)];
        if (has_region(rng)) r.region = regions[reg_pick(rng)];
        r.seq = static_cast<std::uint64_t>(i + 1);
        log.push_back(std::move(r));
    }
    return log;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("pollcast-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace pollcast::testing
