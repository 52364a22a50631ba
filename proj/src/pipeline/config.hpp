#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "data/observation_series.hpp"
#include "filter/particle_filter.hpp"
#include "model/seird.hpp"

namespace seirdmon {

struct RunConfig {
    std::string data_dir;      // directory holding the three JHU global files
    std::string region = "Qatar";
    Date start_date{std::chrono::year{2020}, std::chrono::month{2}, std::chrono::day{29}};
    std::int64_t days = 135;   // filter steps; 0 uses every available day
    std::string observations;  // canonical CSV; empty means <out>/observations.csv
    std::string out_dir = "out";

    CloudSizes sizes;
    int substeps = kDefaultSubsteps;
    double sigma_log = 0.1;
    bool prior_correction = false;
    unsigned threads = 0;      // 0 picks the hardware concurrency
    PriorSpec prior;
    StateVector init{2782000.0, 3.0, 1.0, 0.0, 0.0};
    std::uint64_t seed = 20200229;

    double lambda = 0.2;
    double control_limit = 9.48;
    bool sweep = false;
    std::vector<double> sweep_lambdas{0.1, 0.15, 0.2, 0.25, 0.3};

    // simulate
    ParamVector sim_params{3e-7, 1.0 / 7.0, 1.0 / 14.0, 1.0 / 200.0};
    std::string schedule;      // optional piecewise schedule CSV
};

// Keys accepted by set_option/get_option and config files, in display order.
const std::vector<std::string>& option_keys();
std::string option_help(const std::string& key);

void set_option(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_option(const RunConfig& cfg, const std::string& key);

// `key = value` lines; `#` starts a comment.
void load_config_file(RunConfig& cfg, const std::string& path);

void validate(const RunConfig& cfg);

FilterConfig filter_config(const RunConfig& cfg);
std::string observations_path(const RunConfig& cfg);
unsigned resolved_threads(const RunConfig& cfg);

// Every option except the output directory, one `key = value` per line.
std::string dump_config(const RunConfig& cfg);

}  // namespace seirdmon
