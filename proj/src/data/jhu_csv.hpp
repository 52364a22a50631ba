#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "data/observation_series.hpp"

namespace seirdmon {

// One channel of a JHU wide-format time-series file, restricted to a region.
struct JhuChannel {
    std::string region;
    std::vector<Date> dates;
    std::vector<std::int64_t> counts;
    std::size_t rows_matched = 0;
};

// Aligned cumulative channels for one region.
struct RawSeries {
    std::string region;
    std::vector<Date> dates;
    std::vector<std::int64_t> confirmed;
    std::vector<std::int64_t> recovered;
    std::vector<std::int64_t> deaths;
};

// Sums every row whose trimmed Country/Region equals `region` exactly.
JhuChannel parse_jhu_csv(const std::string& path, const std::string& region);

// Keeps the dates present in all three channels, in order.
RawSeries align_channels(const JhuChannel& confirmed, const JhuChannel& recovered, const JhuChannel& deaths);

// Expects the three global time-series files of the JHU repository in `dir`.
RawSeries load_jhu_directory(const std::string& dir, const std::string& region);

inline constexpr const char* kJhuConfirmedFile = "time_series_covid19_confirmed_global.csv";
inline constexpr const char* kJhuRecoveredFile = "time_series_covid19_recovered_global.csv";
inline constexpr const char* kJhuDeathsFile = "time_series_covid19_deaths_global.csv";

struct DerivedObservations {
    ObservationSeries series;
    std::size_t repairs = 0;  // cumulative values raised to their running maximum
};

DerivedObservations derive_observations(const RawSeries& raw, const Date& start_date);

}  // namespace seirdmon
