#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "data/observation_series.hpp"
#include "filter/particle_filter.hpp"

namespace seirdmon {

using Channels = std::array<std::int64_t, 3>;  // (I, R, D)

struct PredictiveSummary {
    std::int64_t day = 0;
    Channels median{};
    Channels lower95{};
    Channels upper95{};
};

// Nearest-rank quantile of a sample: the ceil(p*n)-th smallest value (1-based).
// The sample is reordered.
std::int64_t nearest_rank(std::vector<std::int64_t>& sample, double p);
double nearest_rank(std::vector<double>& sample, double p);

// One Poisson draw per particle per channel at its predictive means.
PredictiveSummary predictive_summary(const FilterOutput& samples, std::uint64_t rng_seed);

// Pooled over I, R and D. Throws ErrorKind::UndefinedMetric for constant data.
double pseudo_r2(const ObservationSeries& obs, std::span<const PredictiveSummary> fits);

// Fraction of channel-days inside the inclusive 95% band.
double coverage(const ObservationSeries& obs, std::span<const PredictiveSummary> fits);

struct ParamQuantiles {
    std::int64_t day = 0;
    ParamVector median{};
    ParamVector lower95{};
    ParamVector upper95{};
};

ParamQuantiles param_quantiles(const FilterOutput& samples);

}  // namespace seirdmon
