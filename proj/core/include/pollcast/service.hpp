#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pollcast/bias_engine.hpp"
#include "pollcast/model.hpp"
#include "pollcast/store.hpp"

namespace pollcast {

struct RateLimitConfig {
    bool enabled = true;
    double per_device_per_minute = 30;
    double per_ip_per_minute = 600;
};

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::filesystem::path store_path;
    std::filesystem::path registry_path;
    std::filesystem::path official_path;
    RateLimitConfig rate_limit;
    std::int64_t small_class_floor = kDefaultSmallClassFloor;

    // Relative paths resolve against base_dir.
    static ServiceConfig parse(std::istream& in, const std::filesystem::path& base_dir = {});
    static ServiceConfig load(const std::filesystem::path& path);
};

// Token bucket per key; capacity equals the per-minute rate.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;

    bool allow(const std::string& key, double per_minute, Clock::time_point now);

private:
    struct Bucket {
        double tokens;
        Clock::time_point refilled;
    };
    std::mutex mutex_;
    std::map<std::string, Bucket> buckets_;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

// The poll API, independent of the HTTP transport.
class PollService {
public:
    using Clock = std::function<Timestamp()>;

    PollService(PartyRegistry registry, std::optional<OfficialResults> official, VoteStore& store,
                ServiceConfig config = {});

    ApiResponse submit_vote(std::string_view body, const std::string& client_ip);
    ApiResponse get_forecast(std::string_view method, std::optional<std::string> groups);
    ApiResponse get_parties(std::optional<std::string> election) const;
    ApiResponse get_device_history(std::string_view device_id) const;
    ApiResponse get_region_stats() const;
    ApiResponse healthz() const;

    void set_clock(Clock clock) { clock_ = std::move(clock); }
    // Forecast computations actually performed (cache misses).
    std::uint64_t recomputations() const;

    const PartyRegistry& registry() const { return registry_; }

private:
    PartyRegistry registry_;
    std::optional<OfficialResults> official_;
    VoteStore& store_;
    ServiceConfig config_;
    RateLimiter limiter_;
    Clock clock_;

    struct CachedForecast {
        std::uint64_t high_water;
        nlohmann::json body;
    };
    mutable std::mutex cache_mutex_;
    std::map<std::string, CachedForecast> cache_;
    std::uint64_t recomputations_ = 0;
};

ApiResponse api_error(int status, std::string_view code, std::string_view message);

// HTTP binding for PollService.
class HttpServer {
public:
    explicit HttpServer(PollService& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws on failure.
    int bind(const std::string& host, int port);
    // Serves until stop(); blocks the caller.
    void listen();
    // bind + listen on a background thread.
    int start(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pollcast
