#include "pollcast/service.hpp"

#include <fstream>
#include <thread>

#include <httplib.h>

#include "pollcast/error.hpp"
#include "pollcast/ingest.hpp"
#include "pollcast/pipeline.hpp"
#include "pollcast/report_json.hpp"

namespace pollcast {

using nlohmann::json;

ServiceConfig ServiceConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
    ServiceConfig c;
    json doc;
    try {
        doc = json::parse(in);
        auto path_of = [&](const char* key) -> std::filesystem::path {
            if (!doc.contains(key)) return {};
            std::filesystem::path p = doc.at(key).get<std::string>();
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        c.bind_address = doc.value("bind_address", c.bind_address);
        c.port = doc.value("port", c.port);
        c.store_path = path_of("store_path");
        c.registry_path = path_of("registry_path");
        c.official_path = path_of("official_path");
        c.small_class_floor = doc.value("small_class_floor", c.small_class_floor);
        if (doc.contains("rate_limit")) {
            const auto& rl = doc.at("rate_limit");
            c.rate_limit.enabled = rl.value("enabled", c.rate_limit.enabled);
            c.rate_limit.per_device_per_minute = rl.value("per_device_per_minute", c.rate_limit.per_device_per_minute);
            c.rate_limit.per_ip_per_minute = rl.value("per_ip_per_minute", c.rate_limit.per_ip_per_minute);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("service config: ") + e.what());
    }
    if (c.store_path.empty()) throw Error(ErrorCode::parse, "service config: store_path is required");
    if (c.registry_path.empty()) throw Error(ErrorCode::parse, "service config: registry_path is required");
    if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::parse, "service config: port out of range");
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse, "cannot open config '" + path.string() + "'");
    return parse(in, path.parent_path());
}

bool RateLimiter::allow(const std::string& key, double per_minute, Clock::time_point now) {
    std::lock_guard lock(mutex_);
    auto [it, fresh] = buckets_.try_emplace(key, Bucket{per_minute, now});
    auto& b = it->second;
    if (!fresh) {
        const std::chrono::duration<double, std::ratio<60>> elapsed = now - b.refilled;
        b.tokens = std::min(per_minute, b.tokens + elapsed.count() * per_minute);
        b.refilled = now;
    }
    if (b.tokens < 1.0) return false;
    b.tokens -= 1.0;
    return true;
}

ApiResponse api_error(int status, std::string_view code, std::string_view message) {
    return {status, {{"code", code}, {"message", message}}};
}

namespace {

ApiResponse from_error(const Error& e) {
    switch (e.code()) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse: return api_error(400, to_string(e.code()), e.what());
    case ErrorCode::not_found: return api_error(404, "not_found", e.what());
    case ErrorCode::insufficient_prior_data:
    case ErrorCode::empty_electorate:
    case ErrorCode::missing_official: return api_error(409, to_string(e.code()), e.what());
    case ErrorCode::storage: {
        auto r = api_error(503, to_string(e.code()), e.what());
        r.body["retryable"] = true;
        return r;
    }
    default: return api_error(500, to_string(e.code()), e.what());
    }
}

std::optional<std::string> string_field(const json& obj, const char* key, bool& type_error) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        type_error = true;
        return std::nullopt;
    }
    return it->get<std::string>();
}

}  // namespace

PollService::PollService(PartyRegistry registry, std::optional<OfficialResults> official, VoteStore& store,
                         ServiceConfig config)
    : registry_(std::move(registry)), official_(std::move(official)), store_(store), config_(std::move(config)),
      clock_([] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); }) {}

ApiResponse PollService::submit_vote(std::string_view body, const std::string& client_ip) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return api_error(400, "bad_request", "body must be a JSON object");

    bool type_error = false;
    auto device = string_field(doc, "device_id", type_error);
    auto current = string_field(doc, std::string(kFieldCurrent).c_str(), type_error);
    auto prior = string_field(doc, std::string(kFieldPrior).c_str(), type_error);
    auto region = string_field(doc, "region", type_error);
    auto ts = string_field(doc, "ts", type_error);
    if (type_error) return api_error(400, "bad_request", "vote fields must be strings or null");
    if (!device || device->empty()) return api_error(400, "missing_device_id", "device_id is required");

    if (config_.rate_limit.enabled) {
        const auto now = RateLimiter::Clock::now();
        if (!limiter_.allow("ip:" + client_ip, config_.rate_limit.per_ip_per_minute, now) ||
            !limiter_.allow("device:" + *device, config_.rate_limit.per_device_per_minute, now))
            return api_error(429, "rate_limited", "too many votes; slow down");
    }

    if (!current || current->empty()) return api_error(400, "missing_party", "party_2015 is required");
    const auto& cur = registry_.current_election().id;
    if (!party_of(resolve_party(registry_, cur, *current)))
        return api_error(400, "unknown_party", "unknown party code '" + *current + "' for election " + cur);
    if (prior) {
        const auto& pe = registry_.prior_election().id;
        if (!is_found(resolve_party(registry_, pe, *prior)))
            return api_error(400, "unknown_party", "unknown prior party code '" + *prior + "' for election " + pe);
    }

    VoteRecord rec;
    rec.device_id = *device;
    rec.current_party = *current;
    rec.prior_party = prior;
    rec.region = region;
    if (ts) {
        auto parsed = parse_timestamp(*ts);
        if (!parsed) return api_error(400, "bad_timestamp", "ts must be ISO-8601 UTC");
        rec.timestamp = *parsed;
    } else {
        rec.timestamp = clock_();
    }

    try {
        const auto stamp = rec.timestamp;
        const auto seq = store_.append(std::move(rec));
        return {201, {{"seq", seq}, {"device_id", *device}, {"ts", format_timestamp(stamp)}}};
    } catch (const Error& e) {
        return from_error(e);
    }
}

ApiResponse PollService::get_forecast(std::string_view method_text, std::optional<std::string> groups) {
    Method method;
    try {
        method = Method::parse(method_text.empty() ? "raw" : method_text);
        if (groups && !groups->empty()) {
            if (method.kind != MethodKind::fixed)
                return api_error(400, "invalid_argument", "groups apply only to method=fixed");
            method.groups = Method::parse("fixed:" + *groups).groups;
        }
    } catch (const Error& e) {
        return from_error(e);
    }

    const auto snapshot = store_.snapshot();
    const auto key = method.label();
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end() && it->second.high_water == snapshot.high_water())
            return {200, it->second.body};
    }

    json body;
    try {
        auto ctx = ForecastContext::from_registry(registry_, official_ ? &*official_ : nullptr);
        ctx.small_class_floor = config_.small_class_floor;
        body = forecast_to_json(run_forecast(snapshot.events(), ctx, method, snapshot.high_water()));
    } catch (const Error& e) {
        return from_error(e);
    }

    std::lock_guard lock(cache_mutex_);
    ++recomputations_;
    auto& slot = cache_[key];
    if (slot.body.is_null() || slot.high_water <= snapshot.high_water()) slot = {snapshot.high_water(), body};
    return {200, std::move(body)};
}

std::uint64_t PollService::recomputations() const {
    std::lock_guard lock(cache_mutex_);
    return recomputations_;
}

ApiResponse PollService::get_parties(std::optional<std::string> election) const {
    const auto id = election && !election->empty() ? *election : registry_.current_election().id;
    json parties = json::array();
    for (const auto* p : registry_.parties_of(id))
        parties.push_back({{"code", p->code}, {"display_name", p->display_name}, {"group_tags", p->group_tags}});
    json body = {{"election", id}, {"parties", std::move(parties)}};
    if (const auto* e = registry_.find_election(id); e && e->role == ElectionRole::prior)
        body["abstention_code"] = registry_.abstention_code;
    return {200, std::move(body)};
}

ApiResponse PollService::get_device_history(std::string_view device_id) const {
    json events = json::array();
    for (const auto& e : store_.snapshot().history(device_id)) events.push_back(vote_event_to_json(e));
    return {200, {{"device_id", device_id}, {"events", std::move(events)}}};
}

ApiResponse PollService::get_region_stats() const {
    const auto snapshot = store_.snapshot();
    const auto latest = latest_votes(snapshot.events());
    json regions = json::object();
    for (const auto& [device, rec] : latest) {
        auto& slot = regions[rec.region.value_or("unknown")][rec.current_party];
        slot = slot.is_null() ? 1 : slot.get<std::int64_t>() + 1;
    }
    return {200,
            {{"high_water", snapshot.high_water()},
             {"total_devices", latest.size()},
             {"regions", std::move(regions)}}};
}

ApiResponse PollService::healthz() const {
    return {200, {{"status", "ok"}, {"high_water", store_.high_water()}}};
}

struct HttpServer::Impl {
    PollService& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(PollService& s) : service(s) {}
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
}

}  // namespace

HttpServer::HttpServer(PollService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto& svc = impl_->service;
    svr.Get("/api/healthz", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.healthz()); });
    svr.Get("/api/parties", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_parties(query(req, "election")));
    });
    svr.Post("/api/votes", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.submit_vote(req.body, req.remote_addr));
    });
    svr.Get(R"(/api/votes/([^/]+)/history)", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_device_history(req.matches[1].str()));
    });
    svr.Get("/api/forecast", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.get_forecast(query(req, "method").value_or("raw"), query(req, "groups")));
    });
    svr.Get("/api/stats/regions", [&svc](const httplib::Request&, httplib::Response& res) {
        reply(res, svc.get_region_stats());
    });
    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            const auto code = res.status == 404 ? "not_found" : "http_error";
            reply(res, api_error(res.status, code, httplib::status_message(res.status)));
        }
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& svr = impl_->server;
    const int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw Error(ErrorCode::invalid_argument, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

int HttpServer::start(const std::string& host, int port) {
    const int bound = bind(host, port);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace pollcast
