#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pollcast/apportionment.hpp"
#include "pollcast/model.hpp"
#include "pollcast/vote.hpp"

namespace pollcast {

struct OfficialRow {
    PartyCode party;
    std::int64_t votes = 0;
    bool valid = true;
};

struct OfficialResults {
    std::string election;
    std::vector<OfficialRow> rows;

    // Valid rows only.
    std::map<PartyCode, double> valid_counts() const;
};

using LatestVotes = std::map<std::string, VoteRecord>;

// Prior→current respondent tallies. Rows are current parties, columns prior parties.
class CountsMatrix {
public:
    CountsMatrix(std::vector<PartyCode> rows, std::vector<PartyCode> cols);

    const std::vector<PartyCode>& rows() const { return rows_; }
    const std::vector<PartyCode>& cols() const { return cols_; }

    std::int64_t& at(std::size_t row, std::size_t col) { return cells_[row * cols_.size() + col]; }
    std::int64_t at(std::size_t row, std::size_t col) const { return cells_[row * cols_.size() + col]; }
    std::int64_t at(const PartyCode& row, const PartyCode& col) const;

    std::int64_t column_total(std::size_t col) const;
    std::int64_t total() const;

    std::optional<std::size_t> row_index(const PartyCode& code) const;
    std::optional<std::size_t> col_index(const PartyCode& code) const;

private:
    std::vector<PartyCode> rows_;
    std::vector<PartyCode> cols_;
    std::vector<std::int64_t> cells_;
};

// Column-stochastic over column_support; other columns are all zero.
class TransitionMatrix {
public:
    TransitionMatrix(std::vector<PartyCode> rows, std::vector<PartyCode> cols);

    const std::vector<PartyCode>& rows() const { return rows_; }
    const std::vector<PartyCode>& cols() const { return cols_; }
    const std::set<PartyCode>& column_support() const { return support_; }

    double& at(std::size_t row, std::size_t col) { return cells_[row * cols_.size() + col]; }
    double at(std::size_t row, std::size_t col) const { return cells_[row * cols_.size() + col]; }
    double at(const PartyCode& row, const PartyCode& col) const;

    void mark_supported(const PartyCode& col) { support_.insert(col); }
    std::optional<std::size_t> col_index(const PartyCode& code) const;

private:
    std::vector<PartyCode> rows_;
    std::vector<PartyCode> cols_;
    std::vector<double> cells_;
    std::set<PartyCode> support_;
};

struct ResultsVector {
    std::map<PartyCode, double> entries;
    double total() const;
};

struct ForecastVector {
    std::map<PartyCode, double> entries;
    double total() const;
};

struct WeightClass {
    std::int64_t respondents = 0;
    double weight = 0;
    bool small = false;
};

struct WeightTable {
    std::map<PartyCode, WeightClass> classes;
    std::int64_t floor = 0;
};

inline constexpr std::int64_t kDefaultSmallClassFloor = 30;

// One record per device: the latest by (timestamp, seq). An undisclosed
// prior vote inherits the device's most recent disclosed one.
LatestVotes latest_votes(std::span<const VoteRecord> log);

// Devices with a disclosed, non-abstention prior vote, tallied current × prior.
CountsMatrix build_counts(const LatestVotes& latest, const PartyRegistry& registry);

TransitionMatrix normalize(const CountsMatrix& counts);

// Official prior counts restricted to valid rows inside the column support.
ResultsVector build_results_vector(const OfficialResults& official, const TransitionMatrix& m);

// f = M v
ForecastVector forecast(const TransitionMatrix& m, const ResultsVector& v);

WeightTable respondent_weights(const CountsMatrix& counts, const ResultsVector& v,
                               std::int64_t floor = kDefaultSmallClassFloor);

// Latest current-party tallies over every device, zero-filled for registry parties.
VoteVector raw_forecast(const LatestVotes& latest, const PartyRegistry& registry);

// Pins each group's current-party total to its official prior total,
// splitting proportionally to the pre-fix forecast.
ForecastVector apply_group_fixes(const ForecastVector& f, std::span<const FixedGroup> groups,
                                 const OfficialResults& official);

}  // namespace pollcast
