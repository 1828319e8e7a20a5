#pragma once

// Named experiments driven by a Config.  Each experiment reads its keys (with
// documented defaults), optionally stops after validation (dry run), and
// otherwise returns verification reports plus CSV-ready tables.

#include "fracmul/config.hpp"
#include "fracmul/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fracmul {

struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<Json>> rows;  // numbers or strings

    std::string to_csv() const;
};

struct ExperimentOutput {
    std::vector<VerificationReport> results;
    std::vector<Table> tables;
    std::vector<Table> plotdata;
    /// Resolved plan (dry run) or remarks.
    std::vector<std::string> plan;

    bool verdict() const;
};

struct RunContext {
    std::size_t workers = 1;
    double tolerance_scale = 1.0;
    bool dry_run = false;
};

struct ExperimentInfo {
    std::string id;
    std::string description;
    /// Keys a user-supplied config file must define.
    std::vector<std::string> required;
};

/// Stable, alphabetical catalog.
const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& experiment_info(const std::string& id);

/// Complete configuration used when no file is given.
Config default_config(const std::string& id);

/// Resolves `cfg` against the defaults (required keys must already be present),
/// then runs or validates the experiment.  Throws ConfigError for bad keys.
ExperimentOutput run_experiment(const std::string& id, const Config& cfg, const RunContext& ctx);

/// Fills in defaults and checks required keys and the experiment key.
Config resolve_config(const std::string& id, const Config& user, bool user_supplied);

}  // namespace fracmul
