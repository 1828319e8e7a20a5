#include <doctest.h>

#include "fracmul/config.hpp"
#include "fracmul/experiments.hpp"
#include "fracmul/report.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

using namespace fracmul;

namespace {

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("config parses sections, lists and comments") {
    const auto cfg = Config::parse(R"(# header
experiment = thm22-scan
alpha = 0.6, 0.75 ,0.9
; another comment
[grid]
half_width = 64
n = 16384
[multiplier]
name = cos-log
)");
    CHECK(cfg.get_string("experiment") == "thm22-scan");
    CHECK(cfg.get_doubles("alpha") == std::vector<double>{0.6, 0.75, 0.9});
    CHECK(cfg.get_double("grid.half_width") == 64.0);
    CHECK(cfg.get_uint("grid.n") == 16384u);
    CHECK(cfg.get_strings("multiplier.name") == std::vector<std::string>{"cos-log"});
    CHECK(cfg.get_double("grid.missing", 3.5) == 3.5);
    CHECK_FALSE(cfg.has("n"));
}

TEST_CASE("config errors carry source, line and key") {
    CHECK(contains(error_of([] { Config::parse("a = 1\na = 2\n", "f.cfg"); }), "f.cfg:2: duplicate key 'a'"));
    CHECK(contains(error_of([] { Config::parse("[grid\n", "f.cfg"); }), "f.cfg:1:"));
    CHECK(contains(error_of([] { Config::parse("x\n", "f.cfg"); }), "expected 'key = value'"));
    CHECK(contains(error_of([] { Config::parse("x =\n", "f.cfg"); }), "has no value"));
    const auto cfg = Config::parse("n = 1.5\nalpha = 0.5, x\n", "f.cfg");
    CHECK(contains(error_of([&] { (void)cfg.get_uint("n"); }), "f.cfg:1: key 'n'"));
    CHECK(contains(error_of([&] { (void)cfg.get_doubles("alpha"); }), "key 'alpha'"));
    CHECK(contains(error_of([&] { (void)cfg.get_string("seed"); }), "missing required key 'seed'"));
    CHECK(contains(error_of([&] { (void)cfg.get_bool("n", true); }), "true or false"));
}

TEST_CASE("config serialization round-trips") {
    Config cfg = Config::parse("b = 2\na = x, y\n[s]\nk = 1e-3\n[r]\nz = 0\n");
    cfg.set("t.q", "4");
    const auto again = Config::parse(cfg.serialize());
    CHECK(again == cfg);
    CHECK(again.serialize() == cfg.serialize());
    // Top-level keys come first.
    CHECK(cfg.entries().front().first == "a");
    CHECK(cfg.entries()[1].first == "b");
}

TEST_CASE("overrides and defaults") {
    Config cfg = Config::parse("alpha = 0.6\n");
    cfg.set("alpha", "0.75");
    cfg.merge_defaults(Config::parse("alpha = 0.9\nseed = 7\n"));
    CHECK(cfg.get_double("alpha") == 0.75);
    CHECK(cfg.get_uint("seed") == 7u);
    CHECK_THROWS_AS(cfg.set("bad key", "1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("k", " "), ConfigError);
}

TEST_CASE("experiment catalog is alphabetical with complete defaults") {
    const auto& cat = experiment_catalog();
    REQUIRE(cat.size() == 11);
    for (std::size_t i = 1; i < cat.size(); ++i) CHECK(cat[i - 1].id < cat[i].id);
    RunContext dry;
    dry.dry_run = true;
    for (const auto& info : cat) {
        const auto cfg = default_config(info.id);
        CHECK(cfg.get_string("experiment") == info.id);
        for (const auto& key : info.required) CHECK(cfg.has(key));
        const auto out = run_experiment(info.id, cfg, dry);
        CHECK_FALSE(out.plan.empty());
        CHECK(out.results.empty());
    }
    CHECK_THROWS_AS((void)experiment_info("no-such"), ConfigError);
}

TEST_CASE("resolve_config requires keys only from user files") {
    CHECK(contains(error_of([] { (void)resolve_config("verify-lemma21", Config::parse("seed = 1\n"), true); }),
                   "missing required key 'alpha'"));
    const auto cfg = resolve_config("verify-lemma21", Config{}, false);
    CHECK(cfg.has("alpha"));
    CHECK(contains(error_of([] {
                       (void)resolve_config("verify-lemma21", Config::parse("experiment = lp-scan\nalpha = 0.7\n"),
                                            true);
                   }),
                   "lp-scan"));
}

TEST_CASE("bad values surface as configuration errors in a dry run") {
    RunContext dry;
    dry.dry_run = true;
    auto cfg = default_config("verify-semigroup");
    cfg.set("alpha", "1.2");
    CHECK(contains(error_of([&] { (void)run_experiment("verify-semigroup", cfg, dry); }), "(0, 1)"));
    cfg = default_config("check-multiplier");
    cfg.set("multiplier", "sinc");
    CHECK_THROWS_AS((void)run_experiment("check-multiplier", cfg, dry), ConfigError);
    cfg = default_config("check-multiplier");
    cfg.set("variants", "plus, sideways");
    CHECK_THROWS_AS((void)run_experiment("check-multiplier", cfg, dry), ConfigError);
    cfg = default_config("verify-symbols");
    cfg.set("grid.n", "1000");
    CHECK(contains(error_of([&] { (void)run_experiment("verify-symbols", cfg, dry); }), "[grid]"));
}

TEST_CASE("doubles are written with 17 significant digits and parse back exactly") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double v = std::ldexp(1.0 + u(rng) / 31.0, static_cast<int>(u(rng)));
        const auto text = format_double(v);
        CHECK(std::stod(text) == v);
        const Json j = Json::parse(dump_json(Json{{"v", v}}));
        CHECK(j["v"].get<double>() == v);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(dump_json(Json{{"x", 0.1}}, -1) == "{\"x\":0.10000000000000001}");
    CHECK(dump_json(Json{{"x", std::numeric_limits<double>::quiet_NaN()}}, -1) == "{\"x\":null}");
    CHECK(dump_json(Json{{"n", 3}, {"s", "a\"b"}}, -1) == "{\"n\":3,\"s\":\"a\\\"b\"}");
}

TEST_CASE("tables render CSV") {
    Table t{"t", {"name", "value", "flag"}, {}};
    t.rows.push_back({"a,b", 0.1, true});
    t.rows.push_back({"plain", 2, Json()});
    CHECK(t.to_csv() == "name,value,flag\n\"a,b\",0.10000000000000001,true\nplain,2,\n");
}

TEST_CASE("report verdict and row json") {
    VerificationReport r;
    r.experiment = "x";
    ReportRow ok;
    ok.name = "ok";
    ok.value = 1.0;
    r.add(ok);
    CHECK(r.verdict());
    ReportRow bad = ok;
    bad.name = "bad";
    bad.pass = false;
    bad.reference = 2.0;
    r.add(bad);
    CHECK_FALSE(r.verdict());
    const auto j = to_json(r);
    CHECK(j["rows"][1]["name"] == "bad");
    CHECK(j["rows"][1]["pass"] == false);
}
