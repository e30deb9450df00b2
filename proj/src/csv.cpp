#include "mscap/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mscap/core.hpp"

namespace mscap {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double_field(const std::string& field, const std::string& context) {
    double value = 0.0;
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (ec != std::errc{} || ptr != last)
        throw DataError{context + ": malformed number '" + field + "'"};
    return value;
}

long parse_long_field(const std::string& field, const std::string& context) {
    long value = 0;
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (ec != std::errc{} || ptr != last)
        throw DataError{context + ": malformed integer '" + field + "'"};
    return value;
}

namespace {

std::uint64_t parse_seed_field(const std::string& field,
                               const std::string& context) {
    std::uint64_t value = 0;
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), last, value);
    if (ec != std::errc{} || ptr != last)
        throw DataError{context + ": malformed seed '" + field + "'"};
    return value;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError{"cannot write '" + path + "'"};
    return out;
}

} // namespace

void write_summary_csv(const std::string& path,
                       std::span<const SummaryRow> rows) {
    std::ofstream out = open_for_write(path);
    out << kSummaryHeader << '\n';
    for (const SummaryRow& row : rows) {
        out << row.problem << ',' << row.dimension << ',' << row.algorithm
            << ',' << row.seed << ',' << format_double(row.final_error) << ','
            << format_double(row.final_fitness) << ',' << row.n_eval << ','
            << row.status << '\n';
    }
    if (!out) throw IoError{"write failed for '" + path + "'"};
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError{"cannot open '" + path + "'"};
    std::string line;
    long line_no = 0;
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != kSummaryHeader)
                throw DataError{path + ": line 1: expected header '" +
                                std::string(kSummaryHeader) + "'"};
            continue;
        }
        const std::string context = path + ": line " + std::to_string(line_no);
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 8)
            throw DataError{context + ": expected 8 columns"};
        SummaryRow row;
        row.problem = f[0];
        row.dimension = parse_long_field(f[1], context);
        row.algorithm = f[2];
        row.seed = parse_seed_field(f[3], context);
        row.final_error = parse_double_field(f[4], context);
        row.final_fitness = parse_double_field(f[5], context);
        row.n_eval = parse_long_field(f[6], context);
        row.status = f[7];
        if (row.status != "ok" && row.status != "failed")
            throw DataError{context + ": unknown status '" + row.status + "'"};
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string trend_to_csv(std::span<const TrendSample> trend) {
    std::ostringstream out;
    out << kTrendHeader << '\n';
    for (const TrendSample& s : trend)
        out << s.n_eval << ',' << format_double(s.best_fitness) << '\n';
    return std::move(out).str();
}

void write_trend_csv(const std::string& path,
                     std::span<const TrendSample> trend) {
    std::ofstream out = open_for_write(path);
    out << trend_to_csv(trend);
    if (!out) throw IoError{"write failed for '" + path + "'"};
}

std::string format_run_record(const RunRecord& record) {
    std::ostringstream out;
    out << "algorithm," << record.algorithm << '\n'
        << "problem," << record.problem << '\n'
        << "dimension," << record.dimension << '\n'
        << "seed," << record.seed << '\n'
        << "max_eval," << record.max_eval << '\n'
        << "n_eval," << record.n_eval << '\n'
        << "nonfinite_evals," << record.nonfinite_evals << '\n'
        << "max_lifetime_seen," << record.max_lifetime_seen << '\n'
        << "best_fitness," << format_double(record.best_fitness) << '\n';
    out << "best_position";
    for (Eigen::Index j = 0; j < record.best_position.size(); ++j)
        out << ',' << format_double(record.best_position[j]);
    out << '\n';
    out << "stage_events";
    for (const StageEvent& e : record.stage_events)
        out << ',' << (e.kind == StageKind::Cap ? (e.update ? "cap+" : "cap-") : "ms");
    out << '\n';
    out << trend_to_csv(record.trend);
    return std::move(out).str();
}

std::string sanitize_file_component(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                        c == '-';
        if (!ok) c = '-';
    }
    return out;
}

} // namespace mscap
