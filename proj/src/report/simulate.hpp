#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "data/observation_series.hpp"
#include "model/seird.hpp"

namespace seirdmon {

// Piecewise-constant rates: each entry applies from its day onward.
struct ScheduleEntry {
    std::int64_t from_day = 0;
    ParamVector params;
};

class PiecewiseSchedule {
public:
    explicit PiecewiseSchedule(ParamVector constant);
    explicit PiecewiseSchedule(std::vector<ScheduleEntry> entries);

    ParamVector operator()(std::int64_t day) const;
    const std::vector<ScheduleEntry>& entries() const { return entries_; }

private:
    std::vector<ScheduleEntry> entries_;
};

// CSV with header `day,alpha,beta,gamma,eta`.
PiecewiseSchedule read_schedule_csv(const std::string& path);

// Integrates the mean model under the schedule and draws Poisson counts for I,
// R and D on days 1..days. Day 0 holds the rounded initial state. Cumulative
// channels are repaired to be non-decreasing.
ObservationSeries simulate(const ParamSchedule& schedule, const StateVector& init, std::int64_t days,
                           std::uint64_t seed, const Date& start_date, int substeps = kDefaultSubsteps);

}  // namespace seirdmon
