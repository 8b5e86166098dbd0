#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <thread>
#include <unistd.h>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "pollcast/error.hpp"
#include "pollcast/export.hpp"
#include "pollcast/ingest.hpp"
#include "pollcast/pipeline.hpp"
#include "pollcast/report_json.hpp"
#include "pollcast/service.hpp"
#include "pollcast/store.hpp"

namespace pollcast::cli {

namespace {

constexpr const char* kExitCodesHelp =
    "Exit codes: 0 success; 1 invalid input, parse or validation errors, storage corruption, bind failure; "
    "2 insufficient prior-vote data for a standardized or fixed forecast.";

struct ForecastFlags {
    std::string votes, official, registry;
    std::vector<std::string> methods;
    std::string groups;
    std::optional<int> seats;
    std::optional<std::string> threshold;
    std::string format = "table";
    std::int64_t floor = kDefaultSmallClassFloor;
};

struct ValidateFlags {
    std::string registry, votes, official;
};

struct ExportFlags {
    std::string store, out = "-", granularity = "day", salt;
    int region_depth = 1;
};

std::string with_commas(std::int64_t n) {
    auto s = std::to_string(n);
    for (int i = static_cast<int>(s.size()) - 3; i > (n < 0 ? 1 : 0); i -= 3) s.insert(static_cast<std::size_t>(i), ",");
    return s;
}

int report_line_errors(const std::string& path, const std::vector<LineError>& errors, std::ostream& err) {
    for (const auto& e : errors) fmt::print(err, "{}:{}: {}\n", path, e.line, e.message);
    return errors.empty() ? kExitOk : kExitError;
}

// Registry must load and validate cleanly; prints violations otherwise.
std::optional<PartyRegistry> load_valid_registry(const std::string& path, std::ostream& err) {
    auto registry = load_registry_file(path);
    const auto violations = validate_registry(registry);
    for (const auto& v : violations) fmt::print(err, "{}: {}: {}\n", path, v.path, v.message);
    if (!violations.empty()) return std::nullopt;
    return registry;
}

void print_table(const std::vector<ForecastReport>& reports, const PartyRegistry& registry, std::ostream& out) {
    std::vector<std::string> labels;
    std::size_t width = 8;
    for (const auto& r : reports) {
        labels.push_back(r.method.label());
        width = std::max(width, labels.back().size());
    }
    std::size_t name_width = 5;
    std::map<PartyCode, std::string> names;
    for (const auto& r : reports) {
        for (const auto& code : r.parties) {
            if (names.count(code)) continue;
            auto res = resolve_party(registry, registry.current_election().id, code);
            names[code] = party_of(res) ? party_of(res)->display_name : code;
            name_width = std::max(name_width, names[code].size());
        }
    }

    fmt::print(out, "{:<{}}", "Party", name_width);
    for (const auto& l : labels) fmt::print(out, "  {:>{}}", l, width);
    out << '\n';
    // row order follows the first report, which follows the registry
    for (const auto& code : reports.front().parties) {
        fmt::print(out, "{:<{}}", names[code], name_width);
        for (const auto& r : reports) fmt::print(out, "  {:>{}}", r.seats.seats_of(code), width);
        out << '\n';
    }
    fmt::print(out, "{:<{}}", "Total", name_width);
    for (const auto& r : reports) fmt::print(out, "  {:>{}}", r.seats.total(), width);
    out << '\n';
    fmt::print(out, "{:<{}}", "Votes", name_width);
    for (const auto& r : reports) fmt::print(out, "  {:>{}}", with_commas(r.sample.usable), width);
    out << '\n';
    // Every non-raw method shares the same prior classes.
    std::set<PartyCode> warned;
    for (const auto& r : reports)
        for (const auto& [party, cls] : r.small_classes)
            if (warned.insert(party).second)
                fmt::print(out, "warning: prior class {} has only {} respondents (weight {:.1f})\n", party,
                           cls.respondents, cls.weight);
}

int cmd_forecast(const ForecastFlags& f, std::ostream& out, std::ostream& err) {
    auto registry = load_valid_registry(f.registry, err);
    if (!registry) return kExitError;

    std::ifstream votes_in(f.votes);
    if (!votes_in) {
        fmt::print(err, "cannot open votes '{}'\n", f.votes);
        return kExitError;
    }
    auto log = parse_vote_log(votes_in, *registry);
    if (report_line_errors(f.votes, log.errors, err) != kExitOk) return kExitError;

    std::optional<OfficialResults> official;
    if (!f.official.empty()) {
        std::ifstream in(f.official);
        if (!in) {
            fmt::print(err, "cannot open official results '{}'\n", f.official);
            return kExitError;
        }
        auto parsed = parse_official_results(in, registry->prior_election().id);
        if (report_line_errors(f.official, parsed.errors, err) != kExitOk) return kExitError;
        official = std::move(parsed.results);
    }

    auto ctx = ForecastContext::from_registry(*registry, official ? &*official : nullptr);
    if (f.seats) ctx.house_size = *f.seats;
    if (f.threshold) ctx.threshold = Fraction::parse(*f.threshold);
    ctx.small_class_floor = f.floor;

    std::vector<Method> methods;
    for (const auto& text : f.methods.empty() ? std::vector<std::string>{"raw"} : f.methods) {
        auto m = Method::parse(text);
        if (m.kind == MethodKind::fixed && m.groups.empty() && !f.groups.empty())
            m.groups = Method::parse("fixed:" + f.groups).groups;
        methods.push_back(std::move(m));
    }

    std::uint64_t high_water = 0;
    for (const auto& r : log.records) high_water = std::max(high_water, r.seq);

    std::vector<ForecastReport> reports;
    for (const auto& m : methods) reports.push_back(run_forecast(log.records, ctx, m, high_water));

    if (f.format == "json") {
        nlohmann::json doc = {{"house_size", ctx.house_size},
                              {"threshold", ctx.threshold.to_string()},
                              {"forecasts", nlohmann::json::array()}};
        for (const auto& r : reports) doc["forecasts"].push_back(forecast_to_json(r));
        out << doc.dump(2) << '\n';
    } else {
        print_table(reports, *registry, out);
    }
    return kExitOk;
}

int cmd_validate(const ValidateFlags& f, std::ostream& out, std::ostream& err) {
    int status = kExitOk;
    auto registry = load_registry_file(f.registry);
    const auto violations = validate_registry(registry);
    for (const auto& v : violations) fmt::print(err, "{}: {}: {}\n", f.registry, v.path, v.message);
    if (!violations.empty()) status = kExitError;

    const bool usable = violations.empty();
    if (!f.votes.empty()) {
        if (!usable) {
            fmt::print(err, "{}: skipped, registry is invalid\n", f.votes);
        } else {
            std::ifstream in(f.votes);
            if (!in) {
                fmt::print(err, "cannot open votes '{}'\n", f.votes);
                status = kExitError;
            } else {
                auto log = parse_vote_log(in, registry);
                if (report_line_errors(f.votes, log.errors, err) != kExitOk) status = kExitError;
                fmt::print(out, "{}: {} records, {} errors\n", f.votes, log.records.size(), log.errors.size());
            }
        }
    }
    if (!f.official.empty()) {
        std::ifstream in(f.official);
        if (!in) {
            fmt::print(err, "cannot open official results '{}'\n", f.official);
            status = kExitError;
        } else {
            auto parsed = parse_official_results(in);
            if (report_line_errors(f.official, parsed.errors, err) != kExitOk) status = kExitError;
            if (usable) {
                const auto& prior = registry.prior_election().id;
                for (const auto& row : parsed.results.rows)
                    if (row.valid && !party_of(resolve_party(registry, prior, row.party)))
                        fmt::print(out, "{}: note: '{}' is not a registry party; it will be ignored\n", f.official,
                                   row.party);
            }
        }
    }
    if (status == kExitOk) fmt::print(out, "ok\n");
    return status;
}

int cmd_export(const ExportFlags& f, std::ostream& out, std::ostream& err) {
    const auto granularity = parse_granularity(f.granularity);
    if (!granularity) {
        fmt::print(err, "unknown granularity '{}' (second|minute|hour|day)\n", f.granularity);
        return kExitError;
    }
    const auto snapshot = load_snapshot(f.store);
    ExportOptions options{*granularity, f.salt, f.region_depth};

    std::size_t n = 0;
    if (f.out == "-") {
        n = export_obfuscated(snapshot.events(), options, out);
    } else {
        std::ofstream file(f.out, std::ios::trunc);
        if (!file) {
            fmt::print(err, "cannot write '{}'\n", f.out);
            return kExitError;
        }
        n = export_obfuscated(snapshot.events(), options, file);
    }
    fmt::print(f.out == "-" ? err : out, "exported {} records\n", n);
    return kExitOk;
}

int cmd_serve(const std::string& config_path, std::ostream& out, std::ostream& err) {
    const auto config = ServiceConfig::load(config_path);
    auto registry = load_valid_registry(config.registry_path.string(), err);
    if (!registry) return kExitError;
    std::optional<OfficialResults> official;
    if (!config.official_path.empty())
        official = load_official_file(config.official_path.string(), registry->prior_election().id);

    // Signals go to a dedicated waiter; every other thread inherits the mask.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGINT);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    VoteStore store(config.store_path);
    PollService service(std::move(*registry), std::move(official), store, config);
    HttpServer server(service);
    int port = 0;
    try {
        port = server.bind(config.bind_address, config.port);
    } catch (const Error& e) {
        fmt::print(err, "{}\n", e.what());
        return kExitError;
    }
    fmt::print(out, "listening on {}:{} (store {}, {} events)\n", config.bind_address, port,
               config.store_path.string(), store.high_water());
    out.flush();

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    ::kill(::getpid(), SIGTERM);  // release the waiter if listen ended on its own
    waiter.join();
    store.flush();
    fmt::print(out, "stopped\n");
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pollcast: bias-corrected poll forecasts and seat apportionment", "pollcast"};
    app.footer(kExitCodesHelp);
    app.require_subcommand(1);

    ForecastFlags ff;
    auto* forecast = app.add_subcommand("forecast", "Run forecast variants over a vote log");
    forecast->add_option("--votes", ff.votes, "Vote log (JSON Lines)")->required();
    forecast->add_option("--official", ff.official, "Official prior-election results (CSV)");
    forecast->add_option("--registry", ff.registry, "Party registry (JSON)")->required();
    forecast->add_option("--method", ff.methods,
                         "raw | standardized | fixed | fixed:G1+G2 (repeat for several columns)");
    forecast->add_option("--groups", ff.groups, "Fixed groups for --method fixed, e.g. AY,YH,AU,S");
    forecast->add_option("--seats", ff.seats, "House size (default: registry)");
    forecast->add_option("--threshold", ff.threshold, "Threshold fraction, e.g. 0.0325 (default: registry)");
    forecast->add_option("--format", ff.format, "table | json")->check(CLI::IsMember({"table", "json"}));
    forecast->add_option("--floor", ff.floor, "Warn on prior classes with fewer respondents");

    ValidateFlags vf;
    auto* validate = app.add_subcommand("validate", "Check registry, vote log and official results");
    validate->add_option("--registry", vf.registry, "Party registry (JSON)")->required();
    validate->add_option("--votes", vf.votes, "Vote log (JSON Lines)");
    validate->add_option("--official", vf.official, "Official prior-election results (CSV)");

    ExportFlags ef;
    auto* exp = app.add_subcommand("export", "Write an obfuscated copy of a vote store");
    exp->add_option("--store", ef.store, "Vote store file")->required();
    exp->add_option("--out", ef.out, "Output path, - for stdout");
    exp->add_option("--granularity", ef.granularity, "second | minute | hour | day");
    exp->add_option("--salt", ef.salt, "Pseudonym salt (default: random per export)");
    exp->add_option("--region-depth", ef.region_depth, "Region components to keep; 0 drops, -1 keeps all");

    std::string config_path;
    auto* serve = app.add_subcommand("serve", "Run the poll HTTP service");
    serve->add_option("--config", config_path, "Service config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*forecast) return cmd_forecast(ff, out, err);
        if (*validate) return cmd_validate(vf, out, err);
        if (*exp) return cmd_export(ef, out, err);
        if (*serve) return cmd_serve(config_path, out, err);
    } catch (const Error& e) {
        fmt::print(err, "error: {}\n", e.what());
        return e.code() == ErrorCode::insufficient_prior_data ? kExitInsufficientPrior : kExitError;
    }
    return kExitError;
}

}  // namespace pollcast::cli
