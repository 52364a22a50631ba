#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "model/likelihood.hpp"

namespace seirdmon {

using Date = std::chrono::year_month_day;

// ISO 8601 (YYYY-MM-DD).
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& d);
Date add_days(const Date& d, std::int64_t n);
std::int64_t days_between(const Date& from, const Date& to);

struct ObservationSeries {
    Date start_date{};
    std::vector<Observation> observations;  // observations[k].day == k

    friend bool operator==(const ObservationSeries&, const ObservationSeries&) = default;
};

// Canonical long-format CSV: header `day,date,infected,recovered,deaths`.
void write_observation_csv(std::ostream& os, const ObservationSeries& series);
void write_observation_csv(const std::string& path, const ObservationSeries& series);
ObservationSeries read_observation_csv(std::istream& is);
ObservationSeries read_observation_csv(const std::string& path);

}  // namespace seirdmon
