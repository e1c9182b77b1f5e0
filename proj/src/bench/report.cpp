#include "cueforge/bench/report.hpp"

#include "cueforge/common/errors.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace cueforge {

using nlohmann::ordered_json;

Interval wilson_interval(long successes, long n, double z)
{
    if (n <= 0)
        return {0, 1};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1 + z2 / nn;
    const double centre = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

const RateRow* ExperimentReport::find(const std::string& label) const
{
    for (const auto& r : rows)
        if (r.label == label)
            return &r;
    return nullptr;
}

const RateRow& ExperimentReport::at(const std::string& label) const
{
    if (const RateRow* r = find(label))
        return *r;
    throw Error("report has no row '" + label + "'");
}

std::string report_to_json(const ExperimentReport& r)
{
    ordered_json doc;
    doc["schema"] = kReportSchema;
    doc["experiment"] = r.experiment;
    doc["seed"] = r.seed;
    doc["config"] = r.config;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        const Interval ci = row.ci();
        ordered_json j;
        j["label"] = row.label;
        j["variant"] = row.variant;
        j["mirror"] = row.mirror;
        j["sigma_deg"] = row.sigma_deg;
        j["shift"] = row.shift;
        j["n"] = row.n;
        j["successes"] = row.successes;
        j["rate"] = row.rate();
        j["ci95"] = {ci.lo, ci.hi};
        rows.push_back(std::move(j));
    }
    doc["results"] = std::move(rows);
    doc["extra"] = r.extra;
    return doc.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text)
{
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ParseError(std::string("report: invalid JSON: ") + e.what());
    }
    if (doc.value("schema", 0) != kReportSchema)
        throw ParseError("report: unsupported schema version");
    ExperimentReport r;
    try {
        r.experiment = doc.at("experiment").get<std::string>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.config = doc.at("config");
        r.extra = doc.value("extra", ordered_json::object());
        for (const auto& j : doc.at("results")) {
            RateRow row;
            row.label = j.at("label").get<std::string>();
            row.variant = j.at("variant").get<std::string>();
            row.mirror = j.at("mirror").get<bool>();
            row.sigma_deg = j.at("sigma_deg").get<double>();
            row.shift = j.at("shift").get<std::string>();
            row.n = j.at("n").get<long>();
            row.successes = j.at("successes").get<long>();
            r.rows.push_back(row);
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    return r;
}

namespace {

// shortest text that reads back to the same double
std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

} // namespace

std::string report_to_csv(const ExperimentReport& r)
{
    std::ostringstream out;
    out << "experiment,label,variant,mirror,sigma_deg,shift,n,successes,rate,ci_lo,ci_hi\n";
    for (const auto& row : r.rows) {
        const Interval ci = row.ci();
        out << r.experiment << ',' << row.label << ',' << row.variant << ',' << (row.mirror ? 1 : 0) << ','
            << num(row.sigma_deg) << ',' << row.shift << ',' << row.n << ',' << row.successes << ',' << num(row.rate())
            << ',' << num(ci.lo) << ',' << num(ci.hi) << '\n';
    }
    return out.str();
}

} // namespace cueforge
