#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pollcast/apportionment.hpp"
#include "pollcast/bias_engine.hpp"

namespace pollcast {

enum class MethodKind { raw, standardized, fixed };

// A forecast variant: raw, standardized, or fixed with a list of group ids.
// An empty group list on a fixed method means every registry group.
struct Method {
    MethodKind kind = MethodKind::raw;
    std::vector<std::string> groups;

    // "raw", "standardized", "fixed", "fixed:AY+YH+AU"
    static Method parse(std::string_view text);
    std::string label() const;

    friend bool operator==(const Method&, const Method&) = default;
};

std::string_view to_string(MethodKind kind);

struct ForecastContext {
    const PartyRegistry* registry = nullptr;
    const OfficialResults* official = nullptr;
    int house_size = 120;
    Fraction threshold;
    std::int64_t small_class_floor = kDefaultSmallClassFloor;

    // House size and threshold default to the registry's current election.
    static ForecastContext from_registry(const PartyRegistry& registry, const OfficialResults* official);
};

struct SampleSizes {
    std::int64_t devices = 0;        // distinct devices in the snapshot
    std::int64_t with_prior = 0;     // disclosed a prior party other than abstention
    std::int64_t abstained = 0;
    std::int64_t usable = 0;         // devices that feed the chosen method
};

struct ForecastReport {
    Method method;                   // groups resolved to concrete ids
    std::vector<PartyCode> parties;  // registry order
    VoteVector votes;                // vector handed to apportionment
    SeatAllocation seats;
    std::map<PartyCode, double> shares;
    SampleSizes sample;
    std::uint64_t high_water = 0;
    std::vector<std::pair<PartyCode, WeightClass>> small_classes;
};

// raw → (standardize) → (fix groups) → threshold → apportion.
ForecastReport run_forecast(std::span<const VoteRecord> log, const ForecastContext& ctx,
                            const Method& method, std::uint64_t high_water = 0);

}  // namespace pollcast
