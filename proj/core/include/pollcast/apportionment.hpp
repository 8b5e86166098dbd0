#pragma once

#include <map>
#include <set>

#include "pollcast/fraction.hpp"
#include "pollcast/model.hpp"

namespace pollcast {

// Votes per party. Real-valued because reweighted forecasts are not integral.
using VoteVector = std::map<PartyCode, double>;

struct SeatAllocation {
    std::map<PartyCode, int> seats;
    int house_size = 0;

    int total() const;
    int seats_of(const PartyCode& code) const;

    friend bool operator==(const SeatAllocation&, const SeatAllocation&) = default;
};

// Relative tolerance used for quotient ties when votes are not all integers.
inline constexpr double kQuotientEpsilon = 1e-9;

// Parties whose votes reach threshold × total (inclusive). Throws
// Error(empty_electorate) when every entry is zero.
std::set<PartyCode> apply_threshold(const VoteVector& votes, const Fraction& threshold);

// Bader-Offer allocation without surplus agreements: Hagenbach-Bischoff
// index floor, then remaining seats by largest average votes/(seats+1).
// Equal averages go to the larger raw vote, then the smaller party code.
SeatAllocation allocate_seats(const VoteVector& votes, int house_size, const Fraction& threshold);

// Reference: plain sequential highest-averages over the given parties.
SeatAllocation dhondt_oracle(const VoteVector& votes, int house_size);

}  // namespace pollcast
