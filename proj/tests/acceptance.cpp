// Acceptance gate: one PASS/FAIL line per criterion at desk scale.
//
// Usage: acceptance [path-to-fracmul-cli]
// Exits 0 when every failure is listed in kKnownFailures.

#include "fracmul/config.hpp"
#include "fracmul/experiments.hpp"
#include "fracmul/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

using namespace fracmul;

namespace {

// Criteria whose failure is understood and documented; they still print FAIL.
const std::vector<std::string> kKnownFailures = {"symbol-identity"};

struct Outcome {
    bool pass;
    std::string detail;
};

struct Timed {
    ExperimentOutput out;
    double seconds;
};

Timed run(const std::string& id, const std::map<std::string, std::string>& pinned) {
    Config cfg = default_config(id);
    for (const auto& [k, v] : pinned) cfg.set(k, v);
    const auto t0 = std::chrono::steady_clock::now();
    auto out = run_experiment(id, cfg, RunContext{});
    return {std::move(out), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

std::vector<const ReportRow*> rows_matching(const ExperimentOutput& out, const std::string& part) {
    std::vector<const ReportRow*> v;
    for (const auto& r : out.results)
        for (const auto& row : r.rows)
            if (row.name.find(part) != std::string::npos) v.push_back(&row);
    return v;
}

double worst(const ExperimentOutput& out, const std::string& part) {
    double w = 0.0;
    for (const auto* row : rows_matching(out, part)) w = std::max(w, row->value);
    return w;
}

std::string failing(const ExperimentOutput& out) {
    std::string s;
    for (const auto& r : out.results)
        for (const auto& row : r.rows)
            if (!row.pass) s += (s.empty() ? "" : ", ") + row.name;
    return s.empty() ? "" : "; failing: " + s;
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const std::string kDesk = "0.6, 0.75, 0.9";

Outcome symbol_identity() {
    const auto r = run("verify-symbols", {{"alpha", kDesk},
                                          {"functions", "gaussian, bump"},
                                          {"grid.half_width", "64"},
                                          {"grid.n", "16384"},
                                          {"tolerance.rel_l2", "1e-2"},
                                          {"tolerance.halving_band", "0.2"}});
    double band = 0.0;
    for (const auto* row : rows_matching(r.out, ":halving")) band = std::max(band, std::abs(row->value - 0.5) / 0.5);
    return {r.out.verdict(), "max rel L2 error " + g(worst(r.out, ":rel_l2")) + " (<= 1e-2), max halving deviation " +
                                 g(band) + " (<= 0.2)" + failing(r.out)};
}

Outcome product_rule() {
    const auto r = run("verify-product-rule", {{"alpha", kDesk}, {"pairs", "10"}, {"tolerance.residual", "1e-8"}});
    return {r.out.verdict(), "max scaled residual " + g(worst(r.out, ":a=")) + " (<= 1e-8) over " +
                                 std::to_string(rows_matching(r.out, ":a=").size()) + " cases" + failing(r.out)};
}

Outcome semigroup() {
    const auto r = run("verify-semigroup", {{"alpha", kDesk},
                                            {"t", "0.5, 1, 2"},
                                            {"tolerance.law", "1e-12"},
                                            {"tolerance.mass", "2e-3"},
                                            {"tolerance.negativity", "1e-6"}});
    double mass = 0.0, lowest = INFINITY;
    for (const auto* row : rows_matching(r.out, ":mass")) mass = std::max(mass, std::abs(row->value - 1.0));
    for (const auto* row : rows_matching(r.out, ":min")) lowest = std::min(lowest, row->value);
    const auto skipped = rows_matching(r.out, ":unresolved").size();
    return {r.out.verdict(), "law " + g(worst(r.out, "law:")) + " (<= 1e-12), mass dev " + g(mass) +
                                 " (<= 2e-3), min " + g(lowest) + " (>= -1e-6), " + std::to_string(skipped) +
                                 " unresolved kernel(s) skipped" + failing(r.out)};
}

Outcome subordination() {
    const auto r = run("verify-subordination", {{"alpha", kDesk}, {"t", "0.5, 1, 2"}, {"tolerance.sup", "1e-3"}});
    const bool fast = r.seconds <= 60.0;
    return {r.out.verdict() && fast,
            "max sup error " + g(worst(r.out, "sub:")) + " (<= 1e-3), " + g(r.seconds) + " s (<= 60)" + failing(r.out)};
}

Outcome lemma_j() {
    const auto r = run("verify-lemma21", {{"alpha", kDesk}, {"tolerance.cauchy", "0.01"}});
    // Regression baselines, frozen after agreement with the double-quadrature oracle.
    const std::map<std::string, double> baseline{
        {"J:a=0.6", 5.7417012614}, {"J:a=0.75", 10.871380878}, {"J:a=0.9", 44.364523751}};
    bool match = true;
    double dev = 0.0;
    for (const auto& [name, v] : baseline) {
        const auto rows = rows_matching(r.out, name);
        if (rows.empty()) {
            match = false;
            continue;
        }
        const double d = std::abs(rows.front()->value - v) / v;
        dev = std::max(dev, d);
        match = match && d <= 1e-7;
    }
    return {r.out.verdict() && match,
            "Cauchy at 1%, max baseline deviation " + g(dev) + " (<= 1e-7)" + failing(r.out)};
}

Outcome scaling() {
    const auto r = run("thm22-scan", {{"alpha", kDesk},
                                      {"multipliers", "constant, cos-log, rational-bump"},
                                      {"variants", "plus, minus, generator"},
                                      {"s_exponent_min", "-8"},
                                      {"s_exponent_max", "8"},
                                      {"tolerance.ratio_bound", "10"},
                                      {"tolerance.refinement", "0.05"}});
    return {r.out.verdict(), "max sup/median " + g(worst(r.out, "sup_over_median")) + " (<= 10) over " +
                                 std::to_string(r.out.results.size()) + " (m, alpha) profiles, refinement 5%" +
                                 failing(r.out)};
}

Outcome classical_implies() {
    const auto r = run("classical-implies-fractional",
                       {{"alpha", kDesk}, {"multipliers", "cos-log, rational-bump"}, {"tolerance.refinement_condition", "0.02"}});
    return {r.out.verdict(), "max inclusion ratio " + g(worst(r.out, "ratio")) + failing(r.out)};
}

Outcome lp_stability() {
    const auto r = run("lp-scan", {{"multipliers", "cos-log"},
                                   {"p", "1.5, 2, 3"},
                                   {"suite.count", "20"},
                                   {"tolerance.refinement", "0.05"}});
    return {r.out.verdict(), "max ratio " + g(worst(r.out, "max_ratio")) + ", p = 2 ratio " +
                                 g(worst(r.out, "plancherel")) + " (<= sup|m| + 1e-8)" + failing(r.out)};
}

Outcome monte_carlo() {
    const auto r = run("mc-generator", {{"alpha", kDesk}, {"x", "0, 1"}, {"t", "1e-3"}, {"samples", "1000000"}});
    std::string kappa;
    for (const auto& row : r.out.results.front().rows)
        if (row.params.value("x", -1.0) == 0.0)
            kappa += (kappa.empty() ? "" : ", ") + g(row.params["kappa_norm"].get<double>());
    return {r.out.verdict() && r.seconds <= 120.0,
            "all within 3 stderr + bias; kappa_norm " + kappa + "; " + g(r.seconds) + " s (<= 120)" + failing(r.out)};
}

Outcome lp_ratios() {
    const auto r = run("gfunc-ratios", {{"alpha", kDesk},
                                        {"p", "2"},
                                        {"lambda_factor", "2"},
                                        {"bounds.lower", "0.02"},
                                        {"bounds.upper", "50"},
                                        {"tolerance.refinement", "0.05"},
                                        {"tolerance.kernel_mass", "1e-6"}});
    double lo = INFINITY, hi = 0.0;
    for (const auto* row : rows_matching(r.out, ":G_")) {
        lo = std::min(lo, row->value);
        hi = std::max(hi, row->value);
    }
    return {r.out.verdict(), "ratios in [" + g(lo) + ", " + g(hi) + "] (within [0.02, 50]), K mass rel 1e-6" +
                                 failing(r.out)};
}

Outcome reproducibility(const std::string& cli) {
    // In process: identical config and seed, identical serialized payload.
    std::string why;
    for (const std::string id : {"mc-generator", "verify-product-rule"}) {
        std::map<std::string, std::string> pinned{{"alpha", "0.75"}};
        if (id == "mc-generator") pinned["samples"] = "100000";
        const auto a = run(id, pinned), b = run(id, pinned);
        Json ja = Json::array(), jb = Json::array();
        for (const auto& r : a.out.results) ja.push_back(to_json(r));
        for (const auto& r : b.out.results) jb.push_back(to_json(r));
        if (dump_json(ja) != dump_json(jb)) why += " " + id + " payload differs;";
    }
    if (cli.empty()) return {why.empty(), why.empty() ? "in-process payloads identical (CLI not given)" : why};
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "fracmul-acceptance";
    fs::remove_all(root);
    auto sh = [](const std::string& cmd) {
        const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return s == -1 ? -1 : WEXITSTATUS(s);
    };
    const std::string base = "\"" + cli + "\" mc-generator --alpha 0.75 --set samples=100000 --out ";
    const int r1 = sh(base + "\"" + (root / "a").string() + "\"");
    const int r2 = sh(base + "\"" + (root / "b").string() + "\"");
    const int diff = sh("\"" + cli + "\" report-diff \"" + (root / "a/mc-generator/report.json").string() + "\" \"" +
                        (root / "b/mc-generator/report.json").string() + "\"");
    fs::remove_all(root);
    if (r1 != 0 || r2 != 0) why += " CLI runs exited " + std::to_string(r1) + "/" + std::to_string(r2) + ";";
    if (diff != 0) why += " report-diff exited " + std::to_string(diff) + ";";
    return {why.empty(), why.empty() ? "in-process payloads identical, report-diff exit 0" : why};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"symbol-identity", symbol_identity},
        {"extended-product-rule", product_rule},
        {"semigroup-laws", semigroup},
        {"subordination-consistency", subordination},
        {"j-function-l2", lemma_j},
        {"kernel-norm-scaling", scaling},
        {"classical-implies-fractional", classical_implies},
        {"lp-stability", lp_stability},
        {"monte-carlo-generator", monte_carlo},
        {"littlewood-paley-ratios", lp_ratios},
        {"reproducibility", [&] { return reproducibility(cli); }},
    };

    std::vector<std::string> failed;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        if (!o.pass) failed.push_back(name);
    }

    std::vector<std::string> unexpected;
    for (const auto& f : failed)
        if (std::find(kKnownFailures.begin(), kKnownFailures.end(), f) == kKnownFailures.end()) unexpected.push_back(f);
    std::cout << criteria.size() - failed.size() << "/" << criteria.size() << " criteria pass";
    if (!failed.empty()) {
        std::cout << "; known failures:";
        for (const auto& f : failed)
            if (std::find(unexpected.begin(), unexpected.end(), f) == unexpected.end()) std::cout << " " << f;
    }
    std::cout << std::endl;
    if (!unexpected.empty()) {
        std::cout << "unexpected failures:";
        for (const auto& f : unexpected) std::cout << " " << f;
        std::cout << std::endl;
        return 1;
    }
    return 0;
}
