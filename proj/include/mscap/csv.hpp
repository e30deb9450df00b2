#pragma once

#include <span>
#include <string>
#include <vector>

#include "mscap/record.hpp"

namespace mscap {

/// Shortest round-trip decimal form of a double ("%.17g"); infinities and
/// NaN come out as "inf"/"-inf"/"nan" and parse back.
std::string format_double(double v);

/// Splits one CSV line on commas (no quoting; the schemas never need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Strict numeric field parsing; `context` names the file location for the
/// DataError message.
double parse_double_field(const std::string& field, const std::string& context);
long parse_long_field(const std::string& field, const std::string& context);

/// One row of an experiment summary.
struct SummaryRow {
    std::string problem;
    long dimension = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    double final_error = 0.0;
    double final_fitness = 0.0;
    long n_eval = 0;
    std::string status = "ok"; // "ok" or "failed"
};

inline constexpr const char* kSummaryHeader =
    "problem,dimension,algorithm,seed,final_error,final_fitness,n_eval,status";

void write_summary_csv(const std::string& path,
                       std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

inline constexpr const char* kTrendHeader = "n_eval,best_fitness";

std::string trend_to_csv(std::span<const TrendSample> trend);
void write_trend_csv(const std::string& path,
                     std::span<const TrendSample> trend);

/// Canonical text form of a whole run record (used for byte-identity
/// checks and debugging).
std::string format_run_record(const RunRecord& record);

/// Replaces every character outside [A-Za-z0-9._-] so a problem or
/// algorithm id can safely name a file.
std::string sanitize_file_component(const std::string& id);

} // namespace mscap
