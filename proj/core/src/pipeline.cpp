#include "pollcast/pipeline.hpp"

#include <algorithm>

#include "pollcast/error.hpp"

namespace pollcast {

std::string_view to_string(MethodKind kind) {
    switch (kind) {
    case MethodKind::raw: return "raw";
    case MethodKind::standardized: return "standardized";
    case MethodKind::fixed: return "fixed";
    }
    return "raw";
}

Method Method::parse(std::string_view text) {
    Method m;
    auto head = text.substr(0, text.find(':'));
    if (head == "raw") m.kind = MethodKind::raw;
    else if (head == "standardized") m.kind = MethodKind::standardized;
    else if (head == "fixed") m.kind = MethodKind::fixed;
    else throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(text) + "'");

    if (head.size() == text.size()) return m;
    if (m.kind != MethodKind::fixed)
        throw Error(ErrorCode::invalid_argument, "only the fixed method takes groups: '" + std::string(text) + "'");
    auto rest = text.substr(head.size() + 1);
    while (!rest.empty()) {
        auto cut = rest.find_first_of("+,");
        auto id = rest.substr(0, cut);
        if (id.empty()) throw Error(ErrorCode::invalid_argument, "empty group id in '" + std::string(text) + "'");
        m.groups.emplace_back(id);
        if (cut == std::string_view::npos) break;
        rest = rest.substr(cut + 1);
    }
    return m;
}

std::string Method::label() const {
    std::string out(to_string(kind));
    if (kind == MethodKind::fixed && !groups.empty()) {
        out += ':';
        for (std::size_t i = 0; i < groups.size(); ++i) {
            if (i) out += '+';
            out += groups[i];
        }
    }
    return out;
}

ForecastContext ForecastContext::from_registry(const PartyRegistry& registry, const OfficialResults* official) {
    const auto& current = registry.current_election();
    ForecastContext ctx;
    ctx.registry = &registry;
    ctx.official = official;
    ctx.house_size = current.house_size;
    ctx.threshold = current.threshold;
    return ctx;
}

namespace {

std::vector<FixedGroup> resolve_groups(const PartyRegistry& registry, Method& method) {
    std::vector<FixedGroup> out;
    if (method.groups.empty()) {
        out = registry.fixed_groups;
        for (const auto& g : out) method.groups.push_back(g.id);
        return out;
    }
    for (const auto& id : method.groups) {
        const auto* g = registry.find_group(id);
        if (!g) throw Error(ErrorCode::invalid_argument, "unknown fixed group '" + id + "'");
        out.push_back(*g);
    }
    return out;
}

}  // namespace

ForecastReport run_forecast(std::span<const VoteRecord> log, const ForecastContext& ctx,
                            const Method& method, std::uint64_t high_water) {
    if (!ctx.registry) throw Error(ErrorCode::invalid_argument, "forecast needs a registry");
    const auto& registry = *ctx.registry;

    ForecastReport report;
    report.method = method;
    report.high_water = high_water;
    report.parties = registry.codes_of(registry.current_election().id);
    std::vector<FixedGroup> groups;
    if (method.kind == MethodKind::fixed) groups = resolve_groups(registry, report.method);

    const auto latest = latest_votes(log);
    report.sample.devices = static_cast<std::int64_t>(latest.size());
    for (const auto& [device, rec] : latest) {
        if (!rec.prior_party) continue;
        if (*rec.prior_party == registry.abstention_code) ++report.sample.abstained;
        else ++report.sample.with_prior;
    }

    if (method.kind == MethodKind::raw) {
        report.votes = raw_forecast(latest, registry);
        report.sample.usable = report.sample.devices;
    } else {
        const auto counts = build_counts(latest, registry);
        if (counts.total() == 0)
            throw Error(ErrorCode::insufficient_prior_data, "insufficient prior data: no respondent disclosed a prior vote");
        if (!ctx.official) throw Error(ErrorCode::missing_official, "standardized forecasts need official prior results");
        const auto m = normalize(counts);
        const auto v = build_results_vector(*ctx.official, m);
        const auto weights = respondent_weights(counts, v, ctx.small_class_floor);
        for (const auto& [party, cls] : weights.classes) {
            report.sample.usable += cls.respondents;
            if (cls.small) report.small_classes.emplace_back(party, cls);
        }
        auto f = forecast(m, v);
        if (method.kind == MethodKind::fixed) f = apply_group_fixes(f, groups, *ctx.official);
        report.votes = std::move(f.entries);
    }

    report.seats = allocate_seats(report.votes, ctx.house_size, ctx.threshold);
    double total = 0;
    for (const auto& [code, v] : report.votes) total += v;
    for (const auto& [code, v] : report.votes) report.shares[code] = v / total;
    // parties outside the registry still show up in votes; keep them visible
    for (const auto& [code, v] : report.votes)
        if (std::find(report.parties.begin(), report.parties.end(), code) == report.parties.end())
            report.parties.push_back(code);
    return report;
}

}  // namespace pollcast
