#include "pollcast/ingest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>

#include <nlohmann/json.hpp>

#include "pollcast/error.hpp"

namespace pollcast {

using nlohmann::json;

std::string to_string(const LineError& e) { return "line " + std::to_string(e.line) + ": " + e.message; }

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::parse, msg); }

std::optional<std::string> optional_string(const json& obj, std::string_view key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail("field '" + std::string(key) + "' must be a string or null");
    return it->get<std::string>();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

VoteRecord parse_vote_line(std::string_view line, const PartyRegistry* registry) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail("record must be a JSON object");

    VoteRecord rec;
    auto device = optional_string(obj, kFieldDevice);
    if (!device) device = optional_string(obj, kFieldPseudonym);
    if (!device || device->empty()) fail("missing device id");
    rec.device_id = std::move(*device);

    auto ts = optional_string(obj, kFieldTimestamp);
    if (!ts) fail("missing timestamp");
    auto parsed = parse_timestamp(*ts);
    if (!parsed) fail("bad timestamp '" + *ts + "'");
    rec.timestamp = *parsed;

    auto current = optional_string(obj, kFieldCurrent);
    if (!current || current->empty()) fail("missing current party");
    rec.current_party = std::move(*current);
    rec.prior_party = optional_string(obj, kFieldPrior);
    rec.region = optional_string(obj, kFieldRegion);

    if (auto it = obj.find(kFieldSeq); it != obj.end() && !it->is_null()) {
        if (!it->is_number_unsigned()) fail("seq must be a non-negative integer");
        rec.seq = it->get<std::uint64_t>();
    }

    if (registry) {
        const auto& cur = registry->current_election().id;
        if (!party_of(resolve_party(*registry, cur, rec.current_party)))
            fail("unknown party code '" + rec.current_party + "' for election " + cur);
        if (rec.prior_party) {
            const auto& prior = registry->prior_election().id;
            if (!is_found(resolve_party(*registry, prior, *rec.prior_party)))
                fail("unknown prior party code '" + *rec.prior_party + "' for election " + prior);
        }
    }
    return rec;
}

VoteLogParse parse_vote_log(std::istream& in, const PartyRegistry& registry) {
    VoteLogParse out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            auto rec = parse_vote_line(line, &registry);
            if (rec.seq == 0) rec.seq = n;
            out.records.push_back(std::move(rec));
        } catch (const Error& e) {
            out.errors.push_back({n, e.what()});
        }
    }
    return out;
}

std::string serialize_vote_record(const VoteRecord& r) {
    nlohmann::ordered_json obj;
    obj[std::string(kFieldDevice)] = r.device_id;
    obj[std::string(kFieldTimestamp)] = format_timestamp(r.timestamp);
    obj[std::string(kFieldCurrent)] = r.current_party;
    obj[std::string(kFieldPrior)] = r.prior_party ? json(*r.prior_party) : json(nullptr);
    obj[std::string(kFieldRegion)] = r.region ? json(*r.region) : json(nullptr);
    if (r.seq) obj[std::string(kFieldSeq)] = r.seq;
    return obj.dump();
}

OfficialParse parse_official_results(std::istream& in, std::string election) {
    OfficialParse out;
    out.results.election = std::move(election);
    std::string line;
    std::size_t n = 0;
    bool header = false;
    std::set<PartyCode> seen;
    while (std::getline(in, line)) {
        ++n;
        auto text = trim(line);
        if (text.empty()) continue;
        if (!header) {
            header = true;
            if (text != "party,votes,valid") {
                out.errors.push_back({n, "expected header 'party,votes,valid'"});
                return out;
            }
            continue;
        }
        std::string_view fields[3];
        std::size_t count = 0;
        for (std::string_view rest = text;; ++count) {
            auto cut = rest.find(',');
            if (count < 3) fields[count] = trim(rest.substr(0, cut));
            if (cut == std::string_view::npos) {
                ++count;
                break;
            }
            rest = rest.substr(cut + 1);
        }
        if (count != 3) {
            out.errors.push_back({n, "expected 3 fields, got " + std::to_string(count)});
            continue;
        }
        OfficialRow row;
        row.party = std::string(fields[0]);
        if (row.party.empty()) {
            out.errors.push_back({n, "empty party code"});
            continue;
        }
        auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), row.votes);
        if (ec != std::errc{} || ptr != fields[1].data() + fields[1].size() || row.votes < 0) {
            out.errors.push_back({n, "votes must be a non-negative integer: '" + std::string(fields[1]) + "'"});
            continue;
        }
        const auto flag = fields[2];
        if (flag == "true" || flag == "1" || flag == "yes") row.valid = true;
        else if (flag == "false" || flag == "0" || flag == "no") row.valid = false;
        else {
            out.errors.push_back({n, "valid must be true or false: '" + std::string(flag) + "'"});
            continue;
        }
        if (!seen.insert(row.party).second) {
            out.errors.push_back({n, "duplicate party code '" + row.party + "'"});
            continue;
        }
        out.results.rows.push_back(std::move(row));
    }
    if (!header) out.errors.push_back({0, "missing header 'party,votes,valid'"});
    return out;
}

namespace {

Fraction read_threshold(const json& j) {
    if (j.is_string()) return Fraction::parse(j.get<std::string>());
    if (j.is_number()) return Fraction::from_double(j.get<double>());
    fail("threshold must be a number or decimal string");
}

std::set<std::string> read_codes(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be an array");
    std::set<std::string> out;
    for (const auto& c : j) {
        if (!c.is_string()) fail(what + " entries must be strings");
        out.insert(c.get<std::string>());
    }
    return out;
}

}  // namespace

PartyRegistry parse_registry(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(std::string("registry: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("registry: document must be an object");

    PartyRegistry r;
    try {
        if (doc.contains("abstention_code")) r.abstention_code = doc.at("abstention_code").get<std::string>();
        for (const auto& e : doc.at("elections")) {
            Election el;
            el.id = e.at("id").get<std::string>();
            const auto role = e.value("role", std::string("current"));
            if (role == "prior") el.role = ElectionRole::prior;
            else if (role == "current") el.role = ElectionRole::current;
            else fail("registry: election role must be 'prior' or 'current', got '" + role + "'");
            el.house_size = e.value("house_size", 120);
            if (e.contains("threshold")) el.threshold = read_threshold(e.at("threshold"));
            else el.threshold = el.role == ElectionRole::current ? Fraction(325, 10000) : Fraction(2, 100);
            r.elections.push_back(std::move(el));
        }
        for (const auto& p : doc.at("parties")) {
            Party party;
            party.code = p.at("code").get<std::string>();
            party.election = p.at("election").get<std::string>();
            party.display_name = p.value("display_name", party.code);
            if (p.contains("group_tags")) party.group_tags = read_codes(p.at("group_tags"), "group_tags");
            r.parties.push_back(std::move(party));
        }
        if (doc.contains("fixed_groups")) {
            for (const auto& g : doc.at("fixed_groups")) {
                FixedGroup group;
                group.id = g.at("id").get<std::string>();
                group.prior_parties = read_codes(g.at("prior_parties"), "prior_parties");
                group.current_parties = read_codes(g.at("current_parties"), "current_parties");
                r.fixed_groups.push_back(std::move(group));
            }
        }
    } catch (const json::exception& e) {
        fail(std::string("registry: ") + e.what());
    }
    return r;
}

PartyRegistry load_registry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse, "cannot open registry '" + path + "'");
    return parse_registry(in);
}

OfficialResults load_official_file(const std::string& path, std::string election) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse, "cannot open official results '" + path + "'");
    auto parsed = parse_official_results(in, std::move(election));
    if (!parsed.errors.empty())
        throw Error(ErrorCode::parse, path + ": " + to_string(parsed.errors.front()));
    return std::move(parsed.results);
}

}  // namespace pollcast
