#include "pollcast/model.hpp"

#include <algorithm>
#include <map>

#include "pollcast/error.hpp"

namespace pollcast {

const Election* PartyRegistry::find_election(std::string_view id) const {
    auto it = std::find_if(elections.begin(), elections.end(),
                           [&](const Election& e) { return e.id == id; });
    return it == elections.end() ? nullptr : &*it;
}

const Election* PartyRegistry::election_by_role(ElectionRole role) const {
    auto it = std::find_if(elections.begin(), elections.end(),
                           [&](const Election& e) { return e.role == role; });
    return it == elections.end() ? nullptr : &*it;
}

const Election& PartyRegistry::prior_election() const {
    if (auto e = election_by_role(ElectionRole::prior)) return *e;
    throw Error(ErrorCode::invalid_argument, "registry has no prior election");
}

const Election& PartyRegistry::current_election() const {
    if (auto e = election_by_role(ElectionRole::current)) return *e;
    throw Error(ErrorCode::invalid_argument, "registry has no current election");
}

std::vector<const Party*> PartyRegistry::parties_of(std::string_view election) const {
    std::vector<const Party*> out;
    for (const auto& p : parties)
        if (p.election == election) out.push_back(&p);
    return out;
}

std::vector<PartyCode> PartyRegistry::codes_of(std::string_view election) const {
    std::vector<PartyCode> out;
    for (const auto& p : parties)
        if (p.election == election) out.push_back(p.code);
    return out;
}

const FixedGroup* PartyRegistry::find_group(std::string_view id) const {
    auto it = std::find_if(fixed_groups.begin(), fixed_groups.end(),
                           [&](const FixedGroup& g) { return g.id == id; });
    return it == fixed_groups.end() ? nullptr : &*it;
}

namespace {

std::string group_path(std::size_t i, const FixedGroup& g) {
    return "fixed_groups[" + std::to_string(i) + "](" + g.id + ")";
}

void check_members(const PartyRegistry& r, const Election* election, const std::set<PartyCode>& codes,
                   const std::string& path, std::vector<Violation>& out) {
    if (codes.empty()) {
        out.push_back({path, "must not be empty"});
        return;
    }
    for (const auto& code : codes) {
        if (!election || !party_of(resolve_party(r, election->id, code)))
            out.push_back({path, "unknown party '" + code + "'"});
    }
}

}  // namespace

std::vector<Violation> validate_registry(const PartyRegistry& r) {
    std::vector<Violation> out;

    if (r.abstention_code.empty()) out.push_back({"abstention_code", "must not be empty"});

    std::map<std::string, std::size_t> election_ids;
    int priors = 0, currents = 0;
    for (std::size_t i = 0; i < r.elections.size(); ++i) {
        const auto& e = r.elections[i];
        const auto path = "elections[" + std::to_string(i) + "]";
        if (e.id.empty()) out.push_back({path + ".id", "must not be empty"});
        if (!election_ids.emplace(e.id, i).second)
            out.push_back({path + ".id", "duplicate election id '" + e.id + "'"});
        if (e.house_size < 1) out.push_back({path + ".house_size", "must be at least 1"});
        if (!(e.threshold < Fraction(1, 1)))
            out.push_back({path + ".threshold", "must be below 1"});
        (e.role == ElectionRole::prior ? priors : currents)++;
    }
    if (priors != 1) out.push_back({"elections", "exactly one election must have role 'prior'"});
    if (currents != 1) out.push_back({"elections", "exactly one election must have role 'current'"});

    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    for (std::size_t i = 0; i < r.parties.size(); ++i) {
        const auto& p = r.parties[i];
        const auto path = "parties[" + std::to_string(i) + "]";
        if (p.code.empty()) out.push_back({path + ".code", "must not be empty"});
        if (p.code == r.abstention_code)
            out.push_back({path + ".code", "collides with abstention_code '" + p.code + "'"});
        if (!r.find_election(p.election))
            out.push_back({path + ".election", "unknown election '" + p.election + "'"});
        if (!seen.emplace(std::pair{p.election, p.code}, i).second)
            out.push_back({path + ".code", "duplicate code '" + p.code + "' in election " + p.election});
    }

    const auto* prior = r.election_by_role(ElectionRole::prior);
    const auto* current = r.election_by_role(ElectionRole::current);
    std::map<std::string, std::size_t> group_ids;
    std::map<PartyCode, std::string> prior_owner, current_owner;
    for (std::size_t i = 0; i < r.fixed_groups.size(); ++i) {
        const auto& g = r.fixed_groups[i];
        const auto path = group_path(i, g);
        if (g.id.empty()) out.push_back({path + ".id", "must not be empty"});
        if (!group_ids.emplace(g.id, i).second)
            out.push_back({path + ".id", "duplicate group id '" + g.id + "'"});
        check_members(r, prior, g.prior_parties, path + ".prior_parties", out);
        check_members(r, current, g.current_parties, path + ".current_parties", out);
        for (const auto& code : g.prior_parties) {
            auto [it, fresh] = prior_owner.emplace(code, g.id);
            if (!fresh)
                out.push_back({path + ".prior_parties", "overlapping prior_parties: '" + code +
                                                            "' also in group " + it->second});
        }
        for (const auto& code : g.current_parties) {
            auto [it, fresh] = current_owner.emplace(code, g.id);
            if (!fresh)
                out.push_back({path + ".current_parties", "overlapping current_parties: '" + code +
                                                              "' also in group " + it->second});
        }
    }
    return out;
}

Resolution resolve_party(const PartyRegistry& registry, std::string_view election, std::string_view code) {
    if (code == registry.abstention_code) {
        // Abstention is only meaningful for the prior election.
        const auto* e = registry.find_election(election);
        if (e && e->role == ElectionRole::prior) return Abstained{};
        return std::monostate{};
    }
    for (const auto& p : registry.parties)
        if (p.election == election && p.code == code) return &p;
    return std::monostate{};
}

}  // namespace pollcast
