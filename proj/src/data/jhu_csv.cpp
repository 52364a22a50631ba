#include "data/jhu_csv.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace seirdmon {
namespace {

constexpr std::size_t kLeadingColumns = 4;

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

Date parse_us_date(std::string_view text, std::size_t line_no) {
    const std::string s(trim(text));
    unsigned m = 0, d = 0;
    int y = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%u/%u/%d%c", &m, &d, &y, &tail) != 3)
        raise(ErrorKind::Format, at_line(line_no) + "unparseable date '" + s + "'");
    if (y < 100) y += 2000;
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) raise(ErrorKind::Format, at_line(line_no) + "invalid date '" + s + "'");
    return date;
}

void repair_monotone(std::vector<std::int64_t>& v, std::size_t& repairs) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] < v[k - 1]) {
            v[k] = v[k - 1];
            ++repairs;
        }
    }
}

}  // namespace

JhuChannel parse_jhu_csv(const std::string& path, const std::string& region) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::NotFound, "cannot open " + path);

    JhuChannel out;
    out.region = region;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line)) raise(ErrorKind::Format, path + ": empty file");
    const auto header = split_csv_line(strip_cr(line));
    if (header.size() <= kLeadingColumns || trim(header[1]) != "Country/Region")
        raise(ErrorKind::Format, path + ": " + at_line(1) + "missing Province/State, Country/Region, Lat, Long header");
    for (std::size_t c = kLeadingColumns; c < header.size(); ++c) {
        out.dates.push_back(parse_us_date(header[c], 1));
        if (out.dates.size() > 1 && out.dates.back() <= out.dates[out.dates.size() - 2])
            raise(ErrorKind::Format, path + ": " + at_line(1) + "dates out of order");
    }
    out.counts.assign(out.dates.size(), 0);

    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view row = strip_cr(line);
        if (trim(row).empty()) continue;
        const auto cells = split_csv_line(row);
        if (cells.size() != header.size())
            raise(ErrorKind::Format, path + ": " + at_line(line_no) + "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(cells.size()));
        if (trim(cells[1]) != region) continue;
        ++out.rows_matched;
        for (std::size_t c = kLeadingColumns; c < cells.size(); ++c)
            out.counts[c - kLeadingColumns] += parse_int(cells[c], line_no);
    }
    if (out.rows_matched == 0) raise(ErrorKind::NotFound, path + ": region '" + region + "' not found");
    return out;
}

RawSeries align_channels(const JhuChannel& confirmed, const JhuChannel& recovered, const JhuChannel& deaths) {
    std::map<Date, std::int64_t> rec, dth;
    for (std::size_t k = 0; k < recovered.dates.size(); ++k) rec.emplace(recovered.dates[k], recovered.counts[k]);
    for (std::size_t k = 0; k < deaths.dates.size(); ++k) dth.emplace(deaths.dates[k], deaths.counts[k]);

    RawSeries out;
    out.region = confirmed.region;
    for (std::size_t k = 0; k < confirmed.dates.size(); ++k) {
        const Date d = confirmed.dates[k];
        const auto r = rec.find(d);
        const auto x = dth.find(d);
        if (r == rec.end() || x == dth.end()) continue;
        out.dates.push_back(d);
        out.confirmed.push_back(confirmed.counts[k]);
        out.recovered.push_back(r->second);
        out.deaths.push_back(x->second);
    }
    if (out.dates.empty()) raise(ErrorKind::DataIntegrity, "channels share no dates");
    return out;
}

RawSeries load_jhu_directory(const std::string& dir, const std::string& region) {
    const std::filesystem::path base(dir);
    if (!std::filesystem::is_directory(base)) raise(ErrorKind::NotFound, "data directory not found: " + dir);
    return align_channels(parse_jhu_csv((base / kJhuConfirmedFile).string(), region),
                          parse_jhu_csv((base / kJhuRecoveredFile).string(), region),
                          parse_jhu_csv((base / kJhuDeathsFile).string(), region));
}

DerivedObservations derive_observations(const RawSeries& raw, const Date& start_date) {
    const std::size_t n = raw.dates.size();
    if (raw.confirmed.size() != n || raw.recovered.size() != n || raw.deaths.size() != n)
        raise(ErrorKind::Dimension, "channel lengths differ from the date vector");
    const auto first = std::find(raw.dates.begin(), raw.dates.end(), start_date);
    if (first == raw.dates.end())
        raise(ErrorKind::InvalidArgument, "start date " + format_iso_date(start_date) + " outside data range");
    const std::size_t k0 = static_cast<std::size_t>(first - raw.dates.begin());
    for (std::size_t k = k0 + 1; k < n; ++k) {
        if (days_between(raw.dates[k - 1], raw.dates[k]) != 1)
            raise(ErrorKind::DataIntegrity, "gap in dates after " + format_iso_date(raw.dates[k - 1]));
    }

    DerivedObservations out;
    std::vector<std::int64_t> c(raw.confirmed.begin() + k0, raw.confirmed.end());
    std::vector<std::int64_t> r(raw.recovered.begin() + k0, raw.recovered.end());
    std::vector<std::int64_t> d(raw.deaths.begin() + k0, raw.deaths.end());
    repair_monotone(c, out.repairs);
    repair_monotone(r, out.repairs);
    repair_monotone(d, out.repairs);

    std::string bad;
    out.series.start_date = start_date;
    out.series.observations.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::int64_t infected = c[k] - r[k] - d[k];
        if (infected < 0 || r[k] < 0 || d[k] < 0) {
            if (!bad.empty()) bad += ", ";
            bad += format_iso_date(raw.dates[k0 + k]);
        }
        out.series.observations.push_back(Observation{static_cast<std::int64_t>(k), infected, r[k], d[k]});
    }
    if (!bad.empty()) raise(ErrorKind::DataIntegrity, "negative active infections on " + bad);
    return out;
}

}  // namespace seirdmon
