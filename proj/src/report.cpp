#include "fracmul/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fracmul {

bool VerificationReport::verdict() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

ReportRow& VerificationReport::add(ReportRow row) {
    rows.push_back(std::move(row));
    return rows.back();
}

Json to_json(const ReportRow& row) {
    Json j;
    j["name"] = row.name;
    j["value"] = row.value;
    if (row.reference) j["reference"] = *row.reference;
    if (row.tolerance) j["tolerance"] = *row.tolerance;
    if (!row.refinement.empty()) j["refinement"] = row.refinement;
    j["pass"] = row.pass;
    if (!row.params.empty()) j["params"] = row.params;
    return j;
}

Json to_json(const VerificationReport& report) {
    Json j;
    j["experiment"] = report.experiment;
    j["parameters"] = report.parameters;
    Json rows = Json::array();
    for (const auto& r : report.rows) rows.push_back(to_json(r));
    j["rows"] = std::move(rows);
    if (!report.notes.empty()) j["notes"] = report.notes;
    j["verdict"] = report.verdict();
    return j;
}

double relative_change(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(b - a) / scale;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write(std::string& out, const Json& j, int indent, int depth) {
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(key).dump();
                out += pretty ? ": " : ":";
                write(out, value, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write(out, value, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    write(out, j, indent, 0);
    return out;
}

}  // namespace fracmul
