#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pollcast/fraction.hpp"

namespace pollcast {

using PartyCode = std::string;

enum class ElectionRole { prior, current };

struct Election {
    std::string id;
    ElectionRole role = ElectionRole::current;
    int house_size = 120;
    Fraction threshold;
};

struct Party {
    PartyCode code;
    std::string election;
    std::string display_name;
    std::set<std::string> group_tags;
};

// A sectorial bloc whose current forecast total is pinned to its prior total.
struct FixedGroup {
    std::string id;
    std::set<PartyCode> prior_parties;
    std::set<PartyCode> current_parties;
};

struct Violation {
    std::string path;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct Abstained {};

// Result of resolve_party: a party, the abstention marker, or nothing.
using Resolution = std::variant<std::monostate, const Party*, Abstained>;

class PartyRegistry {
public:
    std::vector<Election> elections;
    std::vector<Party> parties;
    std::vector<FixedGroup> fixed_groups;
    std::string abstention_code = "ABSTAINED";

    const Election* find_election(std::string_view id) const;
    const Election* election_by_role(ElectionRole role) const;

    // Throws Error(invalid_argument) when the role is missing.
    const Election& prior_election() const;
    const Election& current_election() const;

    // Parties of one election, in registry order.
    std::vector<const Party*> parties_of(std::string_view election) const;
    std::vector<PartyCode> codes_of(std::string_view election) const;

    const FixedGroup* find_group(std::string_view id) const;
};

std::vector<Violation> validate_registry(const PartyRegistry& registry);

Resolution resolve_party(const PartyRegistry& registry, std::string_view election,
                         std::string_view code);

inline bool is_abstained(const Resolution& r) { return std::holds_alternative<Abstained>(r); }
inline bool is_found(const Resolution& r) { return !std::holds_alternative<std::monostate>(r); }
inline const Party* party_of(const Resolution& r) {
    auto p = std::get_if<const Party*>(&r);
    return p ? *p : nullptr;
}

}  // namespace pollcast
