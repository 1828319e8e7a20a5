// fracmul: run named experiments and write report.json plus CSV tables.
//
// Exit status: 0 pass, 1 verdict fail, 2 configuration error, 3 runtime error.

#include "fracmul/config.hpp"
#include "fracmul/error.hpp"
#include "fracmul/experiments.hpp"
#include "fracmul/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fracmul;

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    bool dry_run = false;
    double tolerance_scale = 1.0;
    std::vector<std::string> sets;
    std::string builtin;
    std::string alpha;
};

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

Config build_config(const std::string& id, const Options& o) {
    const bool from_file = !o.config.empty();
    Config user = from_file ? Config::load(o.config) : Config{};
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        user.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) user.set("seed", std::to_string(*o.seed));
    if (!o.alpha.empty()) user.set("alpha", o.alpha);
    if (!o.builtin.empty()) user.set("multiplier", o.builtin);
    return resolve_config(id, user, from_file);
}

int run(const std::string& id, const Options& o) {
    const Config cfg = build_config(id, o);
    RunContext ctx;
    ctx.workers = std::max<std::size_t>(1, o.workers);
    ctx.tolerance_scale = o.tolerance_scale;
    ctx.dry_run = o.dry_run;
    if (!(o.tolerance_scale > 0.0)) throw ConfigError("--tolerance-scale must be positive");

    const auto start = std::chrono::steady_clock::now();
    const auto output = run_experiment(id, cfg, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (o.dry_run) {
        std::cout << "experiment " << id << " (dry run)\n";
        for (const auto& line : output.plan) std::cout << "  " << line << "\n";
        std::cout << "resolved configuration:\n" << cfg.serialize();
        return 0;
    }

    Json echo = Json::object();
    for (const auto& [k, v] : cfg.entries()) echo[k] = v;
    echo["tolerance_scale"] = format_double(o.tolerance_scale);
    Json results = Json::array();
    for (const auto& r : output.results) results.push_back(to_json(r));
    const bool pass = output.verdict();

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["experiment"] = id;
    report["config_echo"] = echo;
    report["results"] = results;
    report["verdict"] = pass ? "pass" : "fail";
    report["metadata"] = {{"timestamp", utc_timestamp()}, {"wall_time_s", wall}, {"workers", ctx.workers}};

    const fs::path dir = fs::path(o.out) / id;
    write_file(dir / "report.json", dump_json(report) + "\n");
    for (const auto& t : output.tables) write_file(dir / "tables" / (t.name + ".csv"), t.to_csv());
    for (const auto& t : output.plotdata) write_file(dir / "plotdata" / (t.name + ".csv"), t.to_csv());

    std::cout << id << ": " << (pass ? "pass" : "fail") << " (" << (dir / "report.json").string() << ")\n";
    for (const auto& r : output.results)
        for (const auto& row : r.rows)
            if (!row.pass) std::cout << "  failed: " << r.experiment << " " << row.name << " = " << format_double(row.value)
                                     << "\n";
    return pass ? 0 : 1;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

int report_diff(const std::string& a, const std::string& b) {
    Json ja = load_json(a), jb = load_json(b);
    ja.erase("metadata");
    jb.erase("metadata");
    if (ja == jb) {
        std::cout << "reports agree (metadata ignored)\n";
        return 0;
    }
    const auto patch = Json::diff(ja, jb);
    std::size_t shown = 0;
    for (const auto& op : patch) {
        if (shown++ == 20) {
            std::cout << "  ... " << patch.size() - 20 << " more\n";
            break;
        }
        std::cout << "  " << op.value("op", "") << " " << op.value("path", "") << "\n";
    }
    std::cout << "reports differ in " << patch.size() << " place(s)\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional multiplier experiments"};
    app.require_subcommand(1);

    Options opt;
    if (const char* env = std::getenv("FRACMUL_OUT")) opt.out = env;
    if (opt.out.empty()) opt.out = "out";

    std::string chosen;
    for (const auto& info : experiment_catalog()) {
        auto* sub = app.add_subcommand(info.id, info.description);
        sub->add_option("--config", opt.config, "configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output root (default $FRACMUL_OUT or ./out)");
        sub->add_option("--seed", opt.seed, "overrides the 'seed' key");
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--dry-run", opt.dry_run, "validate and print the plan");
        sub->add_option("--tolerance-scale", opt.tolerance_scale, "multiplies every [tolerance] entry");
        sub->add_option("--set", opt.sets, "key=value override (repeatable)");
        sub->add_option("--alpha", opt.alpha, "overrides the 'alpha' list");
        sub->add_option("--builtin", opt.builtin, "overrides the 'multiplier' key");
        sub->callback([&chosen, id = info.id] { chosen = id; });
    }

    auto* list = app.add_subcommand("list", "list experiments");
    std::string diff_a, diff_b;
    auto* diff = app.add_subcommand("report-diff", "compare two report.json files, ignoring metadata");
    diff->add_option("first", diff_a)->required();
    diff->add_option("second", diff_b)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) {
            for (const auto& info : experiment_catalog()) std::cout << info.id << "\t" << info.description << "\n";
            return 0;
        }
        if (diff->parsed()) return report_diff(diff_a, diff_b);
        return run(chosen, opt);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
