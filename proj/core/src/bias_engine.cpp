#include "pollcast/bias_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pollcast/error.hpp"

namespace pollcast {

std::map<PartyCode, double> OfficialResults::valid_counts() const {
    std::map<PartyCode, double> out;
    for (const auto& row : rows)
        if (row.valid) out[row.party] += static_cast<double>(row.votes);
    return out;
}

namespace {

template <typename Code>
std::optional<std::size_t> index_of(const std::vector<Code>& codes, const PartyCode& code) {
    auto it = std::find(codes.begin(), codes.end(), code);
    if (it == codes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - codes.begin());
}

double sum_entries(const std::map<PartyCode, double>& m) {
    double s = 0;
    for (const auto& [k, v] : m) s += v;
    return s;
}

}  // namespace

CountsMatrix::CountsMatrix(std::vector<PartyCode> rows, std::vector<PartyCode> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)), cells_(rows_.size() * cols_.size(), 0) {}

std::int64_t CountsMatrix::at(const PartyCode& row, const PartyCode& col) const {
    auto r = row_index(row);
    auto c = col_index(col);
    return (r && c) ? at(*r, *c) : 0;
}

std::int64_t CountsMatrix::column_total(std::size_t col) const {
    std::int64_t s = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) s += at(r, col);
    return s;
}

std::int64_t CountsMatrix::total() const { return std::accumulate(cells_.begin(), cells_.end(), std::int64_t{0}); }

std::optional<std::size_t> CountsMatrix::row_index(const PartyCode& code) const { return index_of(rows_, code); }
std::optional<std::size_t> CountsMatrix::col_index(const PartyCode& code) const { return index_of(cols_, code); }

TransitionMatrix::TransitionMatrix(std::vector<PartyCode> rows, std::vector<PartyCode> cols)
    : rows_(std::move(rows)), cols_(std::move(cols)), cells_(rows_.size() * cols_.size(), 0.0) {}

double TransitionMatrix::at(const PartyCode& row, const PartyCode& col) const {
    auto r = index_of(rows_, row);
    auto c = index_of(cols_, col);
    return (r && c) ? at(*r, *c) : 0.0;
}

std::optional<std::size_t> TransitionMatrix::col_index(const PartyCode& code) const { return index_of(cols_, code); }

double ResultsVector::total() const { return sum_entries(entries); }
double ForecastVector::total() const { return sum_entries(entries); }

LatestVotes latest_votes(std::span<const VoteRecord> log) {
    LatestVotes latest;
    // most recent record per device that disclosed a prior vote
    std::map<std::string, const VoteRecord*> last_disclosed;
    for (const auto& rec : log) {
        auto [it, fresh] = latest.try_emplace(rec.device_id, rec);
        if (!fresh && supersedes(rec, it->second)) it->second = rec;
        if (rec.prior_party) {
            auto& d = last_disclosed[rec.device_id];
            if (!d || supersedes(rec, *d)) d = &rec;
        }
    }
    for (auto& [device, rec] : latest) {
        if (rec.prior_party) continue;
        if (auto it = last_disclosed.find(device); it != last_disclosed.end())
            rec.prior_party = it->second->prior_party;
    }
    return latest;
}

CountsMatrix build_counts(const LatestVotes& latest, const PartyRegistry& registry) {
    CountsMatrix counts(registry.codes_of(registry.current_election().id),
                        registry.codes_of(registry.prior_election().id));
    for (const auto& [device, rec] : latest) {
        if (!rec.prior_party || *rec.prior_party == registry.abstention_code) continue;
        auto r = counts.row_index(rec.current_party);
        auto c = counts.col_index(*rec.prior_party);
        if (r && c) ++counts.at(*r, *c);
    }
    return counts;
}

TransitionMatrix normalize(const CountsMatrix& counts) {
    TransitionMatrix m(counts.rows(), counts.cols());
    for (std::size_t c = 0; c < counts.cols().size(); ++c) {
        const auto total = counts.column_total(c);
        if (total == 0) continue;
        for (std::size_t r = 0; r < counts.rows().size(); ++r)
            m.at(r, c) = static_cast<double>(counts.at(r, c)) / static_cast<double>(total);
        m.mark_supported(counts.cols()[c]);
    }
    return m;
}

ResultsVector build_results_vector(const OfficialResults& official, const TransitionMatrix& m) {
    ResultsVector v;
    for (const auto& [party, votes] : official.valid_counts()) {
        if (votes > 0 && m.column_support().count(party)) v.entries[party] = votes;
    }
    if (v.entries.empty())
        throw Error(ErrorCode::missing_official,
                    "no official results for any prior party with respondents");
    return v;
}

ForecastVector forecast(const TransitionMatrix& m, const ResultsVector& v) {
    ForecastVector f;
    for (const auto& code : m.rows()) f.entries[code] = 0.0;
    for (const auto& [party, votes] : v.entries) {
        auto c = m.col_index(party);
        if (!c || !m.column_support().count(party))
            throw Error(ErrorCode::dimension_mismatch,
                        "results vector entry '" + party + "' outside the transition matrix support");
        for (std::size_t r = 0; r < m.rows().size(); ++r) f.entries[m.rows()[r]] += m.at(r, *c) * votes;
    }
    return f;
}

WeightTable respondent_weights(const CountsMatrix& counts, const ResultsVector& v, std::int64_t floor) {
    WeightTable table;
    table.floor = floor;
    for (const auto& [party, votes] : v.entries) {
        auto c = counts.col_index(party);
        const auto respondents = c ? counts.column_total(*c) : 0;
        if (respondents == 0)
            throw Error(ErrorCode::dimension_mismatch, "no respondents for prior party '" + party + "'");
        table.classes[party] = {respondents, votes / static_cast<double>(respondents), respondents < floor};
    }
    return table;
}

VoteVector raw_forecast(const LatestVotes& latest, const PartyRegistry& registry) {
    VoteVector out;
    for (const auto& code : registry.codes_of(registry.current_election().id)) out[code] = 0;
    for (const auto& [device, rec] : latest) out[rec.current_party] += 1;
    return out;
}

namespace {

// Grid for pinned values: every member is a multiple of 2^-16 of a vote, so
// group sums are exact in double arithmetic regardless of summation order.
constexpr double kFixGrid = 65536.0;

double snap(double x) { return std::round(x * kFixGrid) / kFixGrid; }

}  // namespace

ForecastVector apply_group_fixes(const ForecastVector& f, std::span<const FixedGroup> groups,
                                 const OfficialResults& official) {
    const auto counts = official.valid_counts();
    ForecastVector out = f;
    for (const auto& g : groups) {
        double target = 0;
        for (const auto& p : g.prior_parties) {
            auto it = counts.find(p);
            if (it == counts.end())
                throw Error(ErrorCode::missing_official,
                            "group " + g.id + ": no official count for prior party '" + p + "'");
            target += it->second;
        }
        std::vector<PartyCode> members(g.current_parties.begin(), g.current_parties.end());
        if (members.empty()) continue;
        double before = 0;
        for (const auto& code : members) {
            auto it = f.entries.find(code);
            if (it == f.entries.end())
                throw Error(ErrorCode::dimension_mismatch,
                            "group " + g.id + ": party '" + code + "' missing from forecast");
            before += it->second;
        }

        // largest pre-fix member takes the rounding remainder
        std::size_t absorber = 0;
        for (std::size_t i = 1; i < members.size(); ++i)
            if (f.entries.at(members[i]) > f.entries.at(members[absorber])) absorber = i;

        double assigned = 0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i == absorber) continue;
            const double share = before > 0 ? f.entries.at(members[i]) / before
                                             : 1.0 / static_cast<double>(members.size());
            const double value = snap(target * share);
            out.entries[members[i]] = value;
            assigned += value;
        }
        out.entries[members[absorber]] = std::max(0.0, target - assigned);
    }
    return out;
}

}  // namespace pollcast
