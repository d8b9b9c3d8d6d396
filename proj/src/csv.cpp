#include "mcsguard/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "mcsguard/errors.hpp"
#include "mcsguard/taskgen.hpp"

namespace mcsguard {

namespace {

const char* kHeader =
    "id,day,hour,minute,duration_min,battery_pct,latitude,longitude,"
    "grid_number,on_peak,coverage_m,legitimacy";

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

template <typename Int>
Int parse_int(std::string_view text, std::size_t line, const char* field) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(line, std::string(field) + " is not an integer: '" + std::string(text) + "'");
    return value;
}

double parse_double(std::string_view text, std::size_t line, const char* field) {
    double value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(line, std::string(field) + " is not a number: '" + std::string(text) + "'");
    return value;
}

void check_range(long value, long lo, long hi, std::size_t line, const char* field) {
    if (value < lo || value > hi)
        fail(line, std::string(field) + " out of range [" + std::to_string(lo) + "," +
                       std::to_string(hi) + "]: " + std::to_string(value));
}

}  // namespace

const std::string& dataset_csv_header() {
    static const std::string header = kHeader;
    return header;
}

std::string dataset_to_csv(const Dataset& dataset) {
    std::string out = dataset_csv_header() + "\n";
    char buf[192];
    for (const TaskRecord& r : dataset.records) {
        const int n = std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%d,%d,%d,%.6f,%.6f,%lld,%d,%d,%d\n",
                                    static_cast<long long>(r.id), r.day, r.hour, r.minute,
                                    r.duration_min, r.battery_pct, r.latitude, r.longitude,
                                    static_cast<long long>(r.grid_number), r.on_peak, r.coverage_m,
                                    r.legitimacy);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

Dataset dataset_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("line 1: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ParseError("line 1: header does not match dataset schema");

    Dataset dataset;
    dataset.origin = DatasetOrigin::loaded;
    std::unordered_set<std::int64_t> seen_ids;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            fail(lineno, "empty row");
        }
        const auto fields = split_fields(line);
        if (fields.size() != 12)
            fail(lineno, "expected 12 fields, found " + std::to_string(fields.size()));

        TaskRecord r;
        r.id = parse_int<std::int64_t>(fields[0], lineno, "id");
        r.day = parse_int<int>(fields[1], lineno, "day");
        r.hour = parse_int<int>(fields[2], lineno, "hour");
        r.minute = parse_int<int>(fields[3], lineno, "minute");
        r.duration_min = parse_int<int>(fields[4], lineno, "duration_min");
        r.battery_pct = parse_int<int>(fields[5], lineno, "battery_pct");
        r.latitude = parse_double(fields[6], lineno, "latitude");
        r.longitude = parse_double(fields[7], lineno, "longitude");
        r.grid_number = parse_int<std::int64_t>(fields[8], lineno, "grid_number");
        r.on_peak = parse_int<int>(fields[9], lineno, "on_peak");
        r.coverage_m = parse_int<int>(fields[10], lineno, "coverage_m");
        r.legitimacy = parse_int<int>(fields[11], lineno, "legitimacy");

        check_range(r.day, 1, 3660, lineno, "day");
        check_range(r.hour, 0, 23, lineno, "hour");
        check_range(r.minute, 0, 59, lineno, "minute");
        if (r.duration_min % 10 != 0) fail(lineno, "duration_min must be a multiple of 10");
        check_range(r.duration_min, 10, 60, lineno, "duration_min");
        check_range(r.battery_pct, 1, 10, lineno, "battery_pct");
        if (r.grid_number < 0) fail(lineno, "grid_number must be non-negative");
        check_range(r.on_peak, 0, 1, lineno, "on_peak");
        if (r.on_peak != compute_on_peak(r.hour))
            fail(lineno, "on_peak inconsistent with hour " + std::to_string(r.hour));
        check_range(r.coverage_m, 1, 1'000'000, lineno, "coverage_m");
        check_range(r.legitimacy, 0, 1, lineno, "legitimacy");

        if (!seen_ids.insert(r.id).second)
            fail(lineno, "duplicate id " + std::to_string(r.id));
        if (!dataset.records.empty()) {
            const TaskRecord& prev = dataset.records.back();
            if (std::tuple(r.day, r.hour, r.minute) < std::tuple(prev.day, prev.hour, prev.minute))
                fail(lineno, "records not in chronological order");
        }
        dataset.records.push_back(r);
    }
    return dataset;
}

Dataset dataset_from_csv(const std::string& text) {
    std::istringstream in(text);
    return dataset_from_csv(in);
}

}  // namespace mcsguard
