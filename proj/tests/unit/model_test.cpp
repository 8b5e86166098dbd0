#include <gtest/gtest.h>

#include "pollcast/error.hpp"
#include "pollcast/fraction.hpp"
#include "pollcast/model.hpp"
#include "support/fixtures.hpp"

using namespace pollcast;
using pollcast::testing::knesset_registry;

TEST(Fraction, ParsesDecimalsExactly) {
    EXPECT_EQ(Fraction::parse("0.0325"), Fraction(13, 400));
    EXPECT_EQ(Fraction::parse("0.02"), Fraction(1, 50));
    EXPECT_EQ(Fraction::parse("3.25e-2"), Fraction(13, 400));
    EXPECT_EQ(Fraction::parse("1/40"), Fraction(1, 40));
    EXPECT_EQ(Fraction::parse("0"), Fraction(0, 1));
    EXPECT_EQ(Fraction::from_double(0.0325), Fraction(13, 400));
    EXPECT_EQ(Fraction(13, 400).to_string(), "0.0325");
    EXPECT_EQ(Fraction(1, 3).to_string(), "1/3");
}

TEST(Fraction, RejectsGarbage) {
    for (const char* bad : {"", "abc", "0.1.2", "-0.1", "1/0", "1e", "0.5x"})
        EXPECT_THROW(Fraction::parse(bad), Error) << bad;
}

TEST(Registry, KnessetRegistryIsValid) {
    const auto r = knesset_registry();
    EXPECT_TRUE(validate_registry(r).empty());
    EXPECT_EQ(r.codes_of("2015").size(), 12u);
    EXPECT_EQ(r.fixed_groups.size(), 4u);
}

TEST(Registry, OverlappingPriorPartiesReported) {
    auto r = knesset_registry();
    r.fixed_groups[1].prior_parties.insert("SHAS");  // YH now shares SHAS with S
    const auto report = validate_registry(r);
    ASSERT_EQ(report.size(), 1u);
    EXPECT_NE(report[0].message.find("overlapping prior_parties"), std::string::npos);
    EXPECT_NE(report[0].path.find("(S)"), std::string::npos);
}

TEST(Registry, EmptyPartyListFlagsEveryGroupReference) {
    auto r = knesset_registry();
    r.parties.clear();
    const auto report = validate_registry(r);
    std::size_t refs = 0;
    for (const auto& g : r.fixed_groups) refs += g.prior_parties.size() + g.current_parties.size();
    EXPECT_EQ(report.size(), refs);
    for (const auto& v : report) EXPECT_NE(v.message.find("unknown party"), std::string::npos);
}

TEST(Registry, StructuralViolations) {
    auto r = knesset_registry();
    r.elections[1].house_size = 0;
    r.elections[1].threshold = Fraction(1, 1);
    r.parties.push_back({"LIKUD", "2015", "dup", {}});
    r.parties.push_back({"ABSTAINED", "2013", "x", {}});
    r.fixed_groups.push_back({"E", {}, {"KULANU"}});
    const auto report = validate_registry(r);
    auto has = [&](std::string_view path, std::string_view text) {
        return std::any_of(report.begin(), report.end(), [&](const Violation& v) {
            return v.path.find(path) != std::string::npos && v.message.find(text) != std::string::npos;
        });
    };
    EXPECT_TRUE(has("elections[1].house_size", "at least 1"));
    EXPECT_TRUE(has("elections[1].threshold", "below 1"));
    EXPECT_TRUE(has("parties[27].code", "duplicate"));
    EXPECT_TRUE(has("parties[28].code", "abstention_code"));
    EXPECT_TRUE(has("(E).prior_parties", "must not be empty"));
}

TEST(Registry, ValidationIsDeterministic) {
    auto r = knesset_registry();
    r.fixed_groups[0].current_parties.insert("SHAS");
    r.parties.pop_back();
    EXPECT_EQ(validate_registry(r), validate_registry(r));
}

TEST(Registry, ResolvesCodes) {
    const auto r = knesset_registry();
    const auto ay = resolve_party(r, "2015", "ALE_YAROK");
    ASSERT_NE(party_of(ay), nullptr);
    EXPECT_EQ(party_of(ay)->code, "ALE_YAROK");
    EXPECT_TRUE(is_abstained(resolve_party(r, "2013", r.abstention_code)));
    EXPECT_FALSE(is_found(resolve_party(r, "2015", "NO_SUCH")));
    // abstention is a prior-vote answer only
    EXPECT_FALSE(is_found(resolve_party(r, "2015", r.abstention_code)));
    // case-sensitive
    EXPECT_FALSE(is_found(resolve_party(r, "2015", "ale_yarok")));
}

TEST(Registry, ValidRegistryResolvesAllGroupMembers) {
    const auto r = knesset_registry();
    ASSERT_TRUE(validate_registry(r).empty());
    for (const auto& g : r.fixed_groups) {
        for (const auto& p : g.prior_parties) EXPECT_NE(party_of(resolve_party(r, "2013", p)), nullptr) << p;
        for (const auto& p : g.current_parties) EXPECT_NE(party_of(resolve_party(r, "2015", p)), nullptr) << p;
    }
}
