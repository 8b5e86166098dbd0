#include "pollcast/apportionment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pollcast/error.hpp"

namespace pollcast {

int SeatAllocation::total() const {
    return std::accumulate(seats.begin(), seats.end(), 0,
                           [](int acc, const auto& kv) { return acc + kv.second; });
}

int SeatAllocation::seats_of(const PartyCode& code) const {
    auto it = seats.find(code);
    return it == seats.end() ? 0 : it->second;
}

namespace {

constexpr double kMaxExact = 9007199254740992.0;  // 2^53

void check_votes(const VoteVector& votes) {
    for (const auto& [code, v] : votes)
        if (!std::isfinite(v) || v < 0)
            throw Error(ErrorCode::invalid_argument, "invalid vote count for party '" + code + "'");
}

bool all_integral(const VoteVector& votes) {
    return std::all_of(votes.begin(), votes.end(), [](const auto& kv) {
        return kv.second <= kMaxExact && std::floor(kv.second) == kv.second;
    });
}

struct Contender {
    const PartyCode* code;
    double votes;
    int seats = 0;
};

// Orders contenders by next average, raw votes, then code.
class AverageOrder {
public:
    explicit AverageOrder(bool exact) : exact_(exact) {}

    // true when a should receive the next seat ahead of b
    bool ahead(const Contender& a, const Contender& b) const {
        const int cmp = compare_averages(a, b);
        if (cmp != 0) return cmp > 0;
        if (a.votes != b.votes) return a.votes > b.votes;
        return *a.code < *b.code;
    }

private:
    int compare_averages(const Contender& a, const Contender& b) const {
        if (exact_) {
            const auto lhs = static_cast<__int128>(a.votes) * (b.seats + 1);
            const auto rhs = static_cast<__int128>(b.votes) * (a.seats + 1);
            return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
        }
        const double qa = a.votes / (a.seats + 1);
        const double qb = b.votes / (b.seats + 1);
        if (std::abs(qa - qb) <= kQuotientEpsilon * std::max(qa, qb)) return 0;
        return qa < qb ? -1 : 1;
    }

    bool exact_;
};

}  // namespace

std::set<PartyCode> apply_threshold(const VoteVector& votes, const Fraction& threshold) {
    check_votes(votes);
    std::set<PartyCode> out;
    if (all_integral(votes)) {
        __int128 total = 0;
        for (const auto& [code, v] : votes) total += static_cast<__int128>(v);
        if (total == 0) throw Error(ErrorCode::empty_electorate, "empty electorate");
        // v / total >= num / den  <=>  v * den >= num * total
        for (const auto& [code, v] : votes) {
            if (v > 0 && static_cast<__int128>(v) * threshold.den() >= total * threshold.num())
                out.insert(code);
        }
        return out;
    }
    double total = 0;
    for (const auto& [code, v] : votes) total += v;
    if (total <= 0) throw Error(ErrorCode::empty_electorate, "empty electorate");
    const double bar = threshold.to_double() * total;
    for (const auto& [code, v] : votes)
        if (v > 0 && v >= bar * (1 - kQuotientEpsilon)) out.insert(code);
    return out;
}

SeatAllocation allocate_seats(const VoteVector& votes, int house_size, const Fraction& threshold) {
    if (house_size < 1) throw Error(ErrorCode::invalid_argument, "house size must be at least 1");
    const auto qualifying = apply_threshold(votes, threshold);
    if (qualifying.empty())
        throw Error(ErrorCode::empty_electorate, "no party reaches the threshold");

    const bool exact = all_integral(votes);
    std::vector<Contender> field;
    for (const auto& code : qualifying) field.push_back({&code, votes.at(code)});

    // Hagenbach-Bischoff index: floor(votes / (moded / house)).
    int assigned = 0;
    if (exact) {
        __int128 moded = 0;
        for (const auto& c : field) moded += static_cast<__int128>(c.votes);
        for (auto& c : field) {
            c.seats = static_cast<int>(static_cast<__int128>(c.votes) * house_size / moded);
            assigned += c.seats;
        }
    } else {
        double moded = 0;
        for (const auto& c : field) moded += c.votes;
        for (auto& c : field) {
            c.seats = static_cast<int>(std::floor(c.votes * house_size / moded + kQuotientEpsilon));
            assigned += c.seats;
        }
        if (assigned > house_size) {
            assigned = 0;
            for (auto& c : field) {
                c.seats = static_cast<int>(std::floor(c.votes * house_size / moded));
                assigned += c.seats;
            }
        }
    }

    const AverageOrder order(exact);
    for (; assigned < house_size; ++assigned) {
        auto best = field.begin();
        for (auto it = std::next(field.begin()); it != field.end(); ++it)
            if (order.ahead(*it, *best)) best = it;
        ++best->seats;
    }

    SeatAllocation out{{}, house_size};
    for (const auto& [code, v] : votes) out.seats[code] = 0;
    for (const auto& c : field) out.seats[*c.code] = c.seats;
    return out;
}

SeatAllocation dhondt_oracle(const VoteVector& votes, int house_size) {
    if (house_size < 1) throw Error(ErrorCode::invalid_argument, "house size must be at least 1");
    check_votes(votes);
    const bool exact = all_integral(votes);
    double total = 0;
    for (const auto& [code, v] : votes) total += v;
    if (total <= 0) throw Error(ErrorCode::empty_electorate, "empty electorate");

    SeatAllocation out{{}, house_size};
    for (const auto& [code, v] : votes) out.seats[code] = 0;

    for (int round = 0; round < house_size; ++round) {
        const PartyCode* winner = nullptr;
        double winner_votes = 0;
        for (const auto& [code, v] : votes) {
            if (v <= 0) continue;
            if (!winner) {
                winner = &code;
                winner_votes = v;
                continue;
            }
            const int s = out.seats[code];
            const int ws = out.seats[*winner];
            bool higher, equal;
            if (exact) {
                const auto lhs = static_cast<__int128>(v) * (ws + 1);
                const auto rhs = static_cast<__int128>(winner_votes) * (s + 1);
                higher = lhs > rhs;
                equal = lhs == rhs;
            } else {
                const double q = v / (s + 1), wq = winner_votes / (ws + 1);
                equal = std::abs(q - wq) <= kQuotientEpsilon * std::max(q, wq);
                higher = !equal && q > wq;
            }
            // map iteration is by ascending code, so an exact tie keeps the earlier code
            if (higher || (equal && v > winner_votes)) {
                winner = &code;
                winner_votes = v;
            }
        }
        ++out.seats[*winner];
    }
    return out;
}

}  // namespace pollcast
