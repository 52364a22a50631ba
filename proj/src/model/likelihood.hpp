#pragma once

#include <cstdint>

#include "model/seird.hpp"

namespace seirdmon {

// One day of observed counts. recovered and deaths are cumulative.
struct Observation {
    std::int64_t day = 0;
    std::int64_t infected = 0;
    std::int64_t recovered = 0;
    std::int64_t deaths = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

// log P(K = k) for K ~ Poisson(lambda); -inf when lambda = 0 < k.
double poisson_logpmf(std::int64_t k, double lambda);

// Sum of the I, R and D channel log-pmfs. S and E are latent and never enter.
double obs_loglik(const Observation& obs, const StateVector& means);

}  // namespace seirdmon
