#pragma once

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cueforge {

inline constexpr int kReportSchema = 1;

struct Interval
{
    double lo = 0, hi = 0;
};

// Wilson score interval; z = 1.96 gives 95%.
Interval wilson_interval(long successes, long n, double z = 1.96);

struct RateRow
{
    std::string label;
    std::string variant;
    bool mirror = false;
    double sigma_deg = 0;
    std::string shift = "none";
    long n = 0;
    long successes = 0;

    double rate() const { return n > 0 ? static_cast<double>(successes) / static_cast<double>(n) : 0.0; }
    Interval ci() const { return wilson_interval(successes, n); }
};

struct ExperimentReport
{
    std::string experiment;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<RateRow> rows;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object(); // curves, distributions

    const RateRow* find(const std::string& label) const;
    const RateRow& at(const std::string& label) const; // throws Error
};

std::string report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const std::string& text);
std::string report_to_csv(const ExperimentReport& r);

} // namespace cueforge
