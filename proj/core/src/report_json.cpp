#include "pollcast/report_json.hpp"

#include "pollcast/error.hpp"

namespace pollcast {

using nlohmann::json;

json forecast_to_json(const ForecastReport& r) {
    json parties = json::array();
    for (const auto& code : r.parties) {
        auto v = r.votes.find(code);
        auto s = r.shares.find(code);
        parties.push_back({{"code", code},
                           {"votes", v == r.votes.end() ? 0.0 : v->second},
                           {"share", s == r.shares.end() ? 0.0 : s->second},
                           {"seats", r.seats.seats_of(code)}});
    }
    json warnings = json::array();
    for (const auto& [party, cls] : r.small_classes)
        warnings.push_back({{"prior_party", party}, {"respondents", cls.respondents}, {"weight", cls.weight}});
    return {
        {"method", {{"kind", to_string(r.method.kind)}, {"groups", r.method.groups}, {"label", r.method.label()}}},
        {"house_size", r.seats.house_size},
        {"high_water", r.high_water},
        {"sample",
         {{"devices", r.sample.devices},
          {"with_prior", r.sample.with_prior},
          {"abstained", r.sample.abstained},
          {"usable", r.sample.usable}}},
        {"parties", std::move(parties)},
        {"small_classes", std::move(warnings)},
    };
}

ForecastReport forecast_from_json(const json& doc) {
    ForecastReport r;
    try {
        r.method = Method::parse(doc.at("method").at("kind").get<std::string>());
        r.method.groups = doc.at("method").at("groups").get<std::vector<std::string>>();
        r.seats.house_size = doc.at("house_size").get<int>();
        r.high_water = doc.at("high_water").get<std::uint64_t>();
        const auto& s = doc.at("sample");
        r.sample = {s.at("devices").get<std::int64_t>(), s.at("with_prior").get<std::int64_t>(),
                    s.at("abstained").get<std::int64_t>(), s.at("usable").get<std::int64_t>()};
        for (const auto& p : doc.at("parties")) {
            const auto code = p.at("code").get<std::string>();
            r.parties.push_back(code);
            r.votes[code] = p.at("votes").get<double>();
            r.shares[code] = p.at("share").get<double>();
            r.seats.seats[code] = p.at("seats").get<int>();
        }
        for (const auto& w : doc.at("small_classes"))
            r.small_classes.emplace_back(w.at("prior_party").get<std::string>(),
                                         WeightClass{w.at("respondents").get<std::int64_t>(),
                                                     w.at("weight").get<double>(), true});
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("forecast document: ") + e.what());
    }
    return r;
}

json vote_event_to_json(const VoteRecord& r) {
    return {{"seq", r.seq},
            {"device_id", r.device_id},
            {"ts", format_timestamp(r.timestamp)},
            {"party_2015", r.current_party},
            {"party_2013", r.prior_party ? json(*r.prior_party) : json(nullptr)},
            {"region", r.region ? json(*r.region) : json(nullptr)}};
}

}  // namespace pollcast
