#include <gtest/gtest.h>

#include <csignal>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "pollcast/ingest.hpp"
#include "pollcast/report_json.hpp"
#include "pollcast/store.hpp"
#include "support/fixtures.hpp"

extern char** environ;

using namespace pollcast;
using namespace pollcast::testing;
using nlohmann::json;

namespace {

const std::string kData = POLLCAST_DATA_DIR;
const std::string kRegistry = kData + "/registry.json";
const std::string kOfficial = kData + "/official_2013.csv";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pollcast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void write_log(const std::filesystem::path& path, const std::vector<VoteRecord>& log) {
    std::ofstream f(path);
    for (const auto& r : log) f << serialize_vote_record(r) << '\n';
}

VoteRecord vote(std::string device, std::string current, std::optional<std::string> prior, std::int64_t sec) {
    VoteRecord r;
    r.device_id = std::move(device);
    r.current_party = std::move(current);
    r.prior_party = std::move(prior);
    r.timestamp = base_time() + std::chrono::seconds{sec};
    return r;
}

std::vector<VoteRecord> sample_log(std::uint64_t seed, int events = 2000) {
    std::mt19937_64 rng(seed);
    LogShape shape;
    shape.devices = 800;
    shape.events = events;
    shape.prior_disclosure = 0.9;
    return random_log(load_registry_file(kRegistry), rng, shape);
}

const std::vector<std::string> kAllMethods = {"raw", "standardized", "fixed:AY", "fixed:AY+YH", "fixed"};

json forecast_json(const std::string& votes) {
    std::vector<std::string> args = {"forecast", "--votes", votes, "--registry", kRegistry, "--official", kOfficial,
                                     "--format", "json"};
    for (const auto& m : kAllMethods) {
        args.push_back("--method");
        args.push_back(m);
    }
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    return json::parse(r.out);
}

}  // namespace

TEST(Cli, RawForecastOnTinyLog) {
    TempDir dir;
    write_log(dir / "v.jsonl", {vote("a", "LIKUD", {}, 0), vote("b", "LIKUD", {}, 1), vote("c", "MERETZ", {}, 2)});
    const auto r = run_cli({"forecast", "--votes", (dir / "v.jsonl").string(), "--registry", kRegistry,
                            "--format", "json"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto doc = json::parse(r.out);
    const auto report = forecast_from_json(doc["forecasts"][0]);
    EXPECT_EQ(report.seats.total(), 120);
    EXPECT_EQ(report.seats.seats_of("LIKUD"), 80);
    EXPECT_EQ(report.seats.seats_of("MERETZ"), 40);
}

TEST(Cli, TableHasOneColumnPerMethod) {
    TempDir dir;
    write_log(dir / "v.jsonl", sample_log(1));
    std::vector<std::string> args = {"forecast", "--votes", (dir / "v.jsonl").string(), "--registry", kRegistry,
                                     "--official", kOfficial};
    for (const auto& m : kAllMethods) {
        args.push_back("--method");
        args.push_back(m);
    }
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    for (const auto& label : {"raw", "standardized", "fixed:AY", "fixed:AY+YH", "fixed:AY+YH+AU+S"})
        EXPECT_NE(r.out.find(label), std::string::npos) << label << "\n" << r.out;
    EXPECT_NE(r.out.find("Total"), std::string::npos);
    EXPECT_NE(r.out.find("Votes"), std::string::npos);
}

TEST(Cli, JsonRoundTrip) {
    TempDir dir;
    write_log(dir / "v.jsonl", sample_log(2));
    const auto doc = forecast_json((dir / "v.jsonl").string());
    ASSERT_EQ(doc["forecasts"].size(), kAllMethods.size());
    for (const auto& f : doc["forecasts"]) {
        const auto report = forecast_from_json(f);
        EXPECT_EQ(report.seats.total(), 120);
        EXPECT_EQ(forecast_to_json(report), f);
    }
}

TEST(Cli, ExitCodes) {
    TempDir dir;
    write_log(dir / "v.jsonl", {vote("a", "LIKUD", {}, 0)});
    auto r = run_cli({"forecast", "--votes", (dir / "v.jsonl").string(), "--registry", kRegistry, "--official",
                      kOfficial, "--method", "standardized"});
    EXPECT_EQ(r.code, cli::kExitInsufficientPrior) << r.err;

    {
        std::ofstream f(dir / "bad.jsonl");
        f << serialize_vote_record(vote("a", "LIKUD", {}, 0)) << '\n';
        f << "{\"device_id\": \"b\", \"party_2015\": \n";
    }
    r = run_cli({"forecast", "--votes", (dir / "bad.jsonl").string(), "--registry", kRegistry});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;

    EXPECT_EQ(run_cli({"forecast"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"nonsense"}).code, cli::kExitError);
    EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
    EXPECT_EQ(run_cli({"forecast", "--votes", "/nonexistent", "--registry", kRegistry}).code, cli::kExitError);
}

TEST(Cli, Validate) {
    TempDir dir;
    write_log(dir / "v.jsonl", sample_log(3, 50));
    auto r = run_cli({"validate", "--registry", kRegistry, "--votes", (dir / "v.jsonl").string(), "--official",
                      kOfficial});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("ok"), std::string::npos);

    {
        std::ofstream f(dir / "bad.jsonl");
        f << serialize_vote_record(vote("a", "LIKUD", {}, 0)) << '\n' << "garbage\n";
    }
    r = run_cli({"validate", "--registry", kRegistry, "--votes", (dir / "bad.jsonl").string()});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;

    auto doc = json::parse(std::ifstream(kRegistry));
    doc["fixed_groups"].push_back({{"id", "DUP"}, {"prior_parties", doc["fixed_groups"][0]["prior_parties"]},
                                   {"current_parties", doc["fixed_groups"][0]["current_parties"]}});
    std::ofstream(dir / "reg.json") << doc.dump();
    r = run_cli({"validate", "--registry", (dir / "reg.json").string()});
    EXPECT_EQ(r.code, cli::kExitError);
    EXPECT_NE(r.err.find("overlapping prior_parties"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("DUP"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("AY"), std::string::npos) << r.err;
}

TEST(Cli, ExportEmptyAndPopulatedStores) {
    TempDir dir;
    { VoteStore store(dir / "empty.jsonl"); }
    auto r = run_cli({"export", "--store", (dir / "empty.jsonl").string(), "--out", (dir / "e.jsonl").string()});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("exported 0 records"), std::string::npos);
    EXPECT_EQ(std::filesystem::file_size(dir / "e.jsonl"), 0u);

    const auto log = sample_log(4);
    {
        VoteStore store(dir / "store.jsonl");
        for (auto rec : log) store.append(rec);
    }
    r = run_cli({"export", "--store", (dir / "store.jsonl").string(), "--out", (dir / "x.jsonl").string(),
                 "--granularity", "hour"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("exported " + std::to_string(log.size()) + " records"), std::string::npos) << r.out;

    const auto original = forecast_json((dir / "store.jsonl").string());
    const auto exported = forecast_json((dir / "x.jsonl").string());
    ASSERT_EQ(original["forecasts"].size(), exported["forecasts"].size());
    for (std::size_t i = 0; i < original["forecasts"].size(); ++i) {
        auto a = original["forecasts"][i], b = exported["forecasts"][i];
        a.erase("high_water");
        b.erase("high_water");
        EXPECT_EQ(a, b) << a["method"]["label"];
    }

    r = run_cli({"export", "--store", (dir / "store.jsonl").string(), "--granularity", "week"});
    EXPECT_EQ(r.code, cli::kExitError);
}

#ifdef POLLCAST_BINARY
namespace {

class Child {
public:
    Child(const std::string& config, const std::filesystem::path& log) {
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_addopen(&actions, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        posix_spawn_file_actions_addopen(&actions, 2, log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
        const std::string binary = POLLCAST_BINARY;
        const char* argv[] = {binary.c_str(), "serve", "--config", config.c_str(), nullptr};
        if (posix_spawn(&pid_, binary.c_str(), &actions, nullptr, const_cast<char**>(argv), environ) != 0) pid_ = -1;
        posix_spawn_file_actions_destroy(&actions);
    }
    ~Child() {
        if (pid_ > 0) {
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, nullptr, 0);
        }
    }
    int terminate() {
        ::kill(pid_, SIGTERM);
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    bool alive() const { return pid_ > 0; }

private:
    pid_t pid_ = -1;
};

int free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), len);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    return ntohs(addr.sin_port);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), {}};
}

bool wait_healthy(httplib::Client& client) {
    for (int i = 0; i < 200; ++i) {
        if (auto r = client.Get("/api/healthz"); r && r->status == 200) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds{25});
    }
    return false;
}

}  // namespace

TEST(Cli, ServeStopsCleanlyAndKeepsVotes) {
    TempDir dir;
    const int port = free_port();
    const json config = {{"bind_address", "127.0.0.1"},
                         {"port", port},
                         {"store_path", (dir / "votes.jsonl").string()},
                         {"registry_path", kRegistry},
                         {"official_path", kOfficial}};
    std::ofstream(dir / "serve.json") << config.dump();

    httplib::Client client("127.0.0.1", port);
    {
        Child server((dir / "serve.json").string(), dir / "serve.log");
        ASSERT_TRUE(server.alive());
        ASSERT_TRUE(wait_healthy(client));
        const auto post = client.Post("/api/votes", R"({"device_id":"X","party_2015":"LIKUD","party_2013":"SHAS"})",
                                      "application/json");
        ASSERT_TRUE(post) << httplib::to_string(post.error()) << "\n" << slurp(dir / "serve.log");
        EXPECT_EQ(post->status, 201);
        EXPECT_EQ(server.terminate(), 0);
    }
    {
        Child server((dir / "serve.json").string(), dir / "serve2.log");
        ASSERT_TRUE(wait_healthy(client));
        const auto history = client.Get("/api/votes/X/history");
        ASSERT_TRUE(history);
        EXPECT_EQ(json::parse(history->body)["events"].size(), 1u);
        EXPECT_EQ(server.terminate(), 0);
    }

    const json busy = {{"bind_address", "256.0.0.1"}, {"port", port}, {"store_path", (dir / "v2.jsonl").string()},
                       {"registry_path", kRegistry}};
    std::ofstream(dir / "bad.json") << busy.dump();
    EXPECT_EQ(run_cli({"serve", "--config", (dir / "bad.json").string()}).code, cli::kExitError);
}
#endif
