#include "data/observation_series.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace seirdmon {

Date parse_iso_date(std::string_view text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
        raise(ErrorKind::Format, "bad ISO date '" + s + "'");
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) raise(ErrorKind::Format, "invalid calendar date '" + s + "'");
    return date;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

Date add_days(const Date& d, std::int64_t n) {
    return Date{std::chrono::sys_days{d} + std::chrono::days{n}};
}

std::int64_t days_between(const Date& from, const Date& to) {
    return (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
}

void write_observation_csv(std::ostream& os, const ObservationSeries& series) {
    os << "day,date,infected,recovered,deaths\n";
    for (const Observation& o : series.observations) {
        os << o.day << ',' << format_iso_date(add_days(series.start_date, o.day)) << ',' << o.infected << ','
           << o.recovered << ',' << o.deaths << '\n';
    }
}

void write_observation_csv(const std::string& path, const ObservationSeries& series) {
    std::ofstream os(path, std::ios::binary);
    if (!os) raise(ErrorKind::Io, "cannot open " + path + " for writing");
    write_observation_csv(os, series);
    if (!os) raise(ErrorKind::Io, "write failed: " + path);
}

ObservationSeries read_observation_csv(std::istream& is) {
    ObservationSeries out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) raise(ErrorKind::Format, "empty observation file");
    ++line_no;
    if (strip_cr(line) != "day,date,infected,recovered,deaths")
        raise(ErrorKind::Format, "line 1: unexpected header '" + line + "'");
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view row = strip_cr(line);
        if (row.empty()) continue;
        const auto cells = split_csv_line(row);
        if (cells.size() != 5)
            raise(ErrorKind::Format, "line " + std::to_string(line_no) + ": expected 5 fields");
        Observation o;
        o.day = parse_int(cells[0], line_no);
        const Date date = parse_iso_date(cells[1]);
        o.infected = parse_int(cells[2], line_no);
        o.recovered = parse_int(cells[3], line_no);
        o.deaths = parse_int(cells[4], line_no);
        if (out.observations.empty()) {
            out.start_date = add_days(date, -o.day);
            if (o.day != 0) raise(ErrorKind::Format, "line " + std::to_string(line_no) + ": series must start at day 0");
        } else if (o.day != out.observations.back().day + 1) {
            raise(ErrorKind::Format, "line " + std::to_string(line_no) + ": days must be consecutive");
        }
        if (add_days(out.start_date, o.day) != date)
            raise(ErrorKind::Format, "line " + std::to_string(line_no) + ": date does not match day index");
        if (o.infected < 0 || o.recovered < 0 || o.deaths < 0)
            raise(ErrorKind::Format, "line " + std::to_string(line_no) + ": negative count");
        out.observations.push_back(o);
    }
    return out;
}

ObservationSeries read_observation_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) raise(ErrorKind::NotFound, "cannot open " + path);
    return read_observation_csv(is);
}

}  // namespace seirdmon
