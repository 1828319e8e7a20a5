#pragma once

// Structured results shared by the verification routines and the CLI.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fracmul {

using Json = nlohmann::ordered_json;

struct ReportRow {
    std::string name;
    double value = 0.0;
    std::optional<double> reference;
    std::optional<double> tolerance;
    /// Values of the same estimate on successively refined discretizations.
    std::vector<double> refinement;
    bool pass = true;
    /// Free-form per-row parameters (alpha, p, s, ...).
    Json params = Json::object();
};

struct VerificationReport {
    std::string experiment;
    Json parameters = Json::object();
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;

    bool verdict() const;
    ReportRow& add(ReportRow row);
};

Json to_json(const ReportRow& row);
Json to_json(const VerificationReport& report);

/// Relative change |b - a| / max(|a|, |b|), zero when both vanish.
double relative_change(double a, double b);

/// "%.17g"; the form used for every float in reports and tables.
std::string format_double(double v);

/// Deterministic serialization: insertion-ordered keys, floats with 17
/// significant digits, non-finite numbers as null.  indent < 0 gives one line.
std::string dump_json(const Json& j, int indent = 2);

}  // namespace fracmul
