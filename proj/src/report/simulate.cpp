#include "report/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "filter/rng_streams.hpp"

namespace seirdmon {

PiecewiseSchedule::PiecewiseSchedule(ParamVector constant) : entries_{{0, constant}} {}

PiecewiseSchedule::PiecewiseSchedule(std::vector<ScheduleEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) raise(ErrorKind::InvalidArgument, "schedule needs at least one entry");
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.from_day < b.from_day; });
    for (const auto& e : entries_) require_valid(e.params);
}

ParamVector PiecewiseSchedule::operator()(std::int64_t day) const {
    ParamVector p = entries_.front().params;
    for (const auto& e : entries_) {
        if (e.from_day > day) break;
        p = e.params;
    }
    return p;
}

PiecewiseSchedule read_schedule_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) raise(ErrorKind::NotFound, "cannot open schedule " + path);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line) || strip_cr(line) != "day,alpha,beta,gamma,eta")
        raise(ErrorKind::Format, path + ": expected header day,alpha,beta,gamma,eta");
    std::vector<ScheduleEntry> entries;
    while (std::getline(is, line)) {
        ++line_no;
        if (strip_cr(line).empty()) continue;
        const auto cells = split_csv_line(strip_cr(line));
        if (cells.size() != 5) raise(ErrorKind::Format, path + ": line " + std::to_string(line_no) + ": expected 5 fields");
        entries.push_back({parse_int(cells[0], line_no),
                           {parse_double(cells[1], line_no), parse_double(cells[2], line_no),
                            parse_double(cells[3], line_no), parse_double(cells[4], line_no)}});
    }
    return PiecewiseSchedule(std::move(entries));
}

namespace {

std::int64_t draw_poisson(std::mt19937_64& rng, double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

}  // namespace

ObservationSeries simulate(const ParamSchedule& schedule, const StateVector& init, std::int64_t days,
                           std::uint64_t seed, const Date& start_date, int substeps) {
    if (days < 1) raise(ErrorKind::InvalidArgument, "days must be >= 1");
    const Trajectory traj = integrate_trajectory(init, schedule, days, substeps);
    ObservationSeries out;
    out.start_date = start_date;
    out.observations.reserve(traj.states.size());
    out.observations.push_back({0, std::llround(init.i), std::llround(init.r), std::llround(init.d)});
    for (std::int64_t k = 1; k <= days; ++k) {
        const StateVector& mean = traj.states[static_cast<std::size_t>(k)];
        auto rng = make_stream(seed, k, StreamPurpose::Simulate);
        Observation o;
        o.day = k;
        o.infected = draw_poisson(rng, mean.i);
        o.recovered = draw_poisson(rng, mean.r);
        o.deaths = draw_poisson(rng, mean.d);
        const Observation& prev = out.observations.back();
        o.recovered = std::max(o.recovered, prev.recovered);
        o.deaths = std::max(o.deaths, prev.deaths);
        out.observations.push_back(o);
    }
    return out;
}

}  // namespace seirdmon
