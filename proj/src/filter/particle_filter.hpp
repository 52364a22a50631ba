#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "model/likelihood.hpp"
#include "model/seird.hpp"

namespace seirdmon {

// Means of independent Exponential priors on each rate.
struct PriorSpec {
    double mean_alpha = 2.0 / 4450000.0;
    double mean_beta = 1.0 / 105.0;
    double mean_gamma = 1.0 / 14.0;
    double mean_eta = 1.0 / 9500.0;
};

void require_valid(const PriorSpec& prior);
double log_prior_density(const PriorSpec& prior, const ParamVector& p);

// Log-normal multiplicative perturbation applied to each rate independently.
struct KernelSpec {
    double sigma_log = 0.1;
};

void require_valid(const KernelSpec& kernel);
double log_kernel_density(const KernelSpec& kernel, const ParamVector& parent, const ParamVector& child);

struct Particle {
    ParamVector params;
    StateVector state;
    double log_weight = 0.0;
    // log g(params | parent); for prior draws this is the prior log-density,
    // so the prior/proposal correction cancels exactly.
    double log_proposal = 0.0;
};

struct CloudSizes {
    std::size_t n_c = 10000;
    std::size_t n_p = 1000;
    std::size_t n_b = 10;
};

struct ParticleCloud {
    std::int64_t day = 0;
    std::vector<Particle> particles;
    CloudSizes sizes;
    bool resampled = false;  // true once particles are an unweighted posterior sample
};

struct FilterOutput {
    std::int64_t day = 0;
    std::vector<ParamVector> posterior_samples;
    double ess = 0.0;  // of the weighted candidate cloud, before resampling
    std::vector<StateVector> predictive_means;
};

struct WeighOptions {
    int substeps = kDefaultSubsteps;
    // Adds log p0(theta) - log g(theta | parent) to each weight. Off by
    // default: with a narrow random-walk proposal it re-imposes the day-0
    // prior every day and pulls weakly identified rates back to the prior.
    bool prior_correction = false;
    unsigned threads = 1;
};

ParticleCloud init_cloud(const PriorSpec& prior, const StateVector& init_state, std::size_t n_c,
                         std::uint64_t master_seed);

// Propagates every particle one day and sets its log-weight against next_obs.
// Throws ErrorKind::Depletion when no particle has a finite weight.
void weigh(ParticleCloud& cloud, const Observation& next_obs, const PriorSpec& prior, const WeighOptions& opts);

struct NormalizedWeights {
    std::vector<double> weights;
    double ess = 0.0;
};

NormalizedWeights normalize(std::span<const double> log_weights);
NormalizedWeights normalize(const ParticleCloud& cloud);

// Multinomial ancestor draw, n iid picks with replacement.
std::vector<std::size_t> multinomial_ancestors(std::span<const double> weights, std::size_t n,
                                               std::uint64_t master_seed, std::int64_t day);

ParticleCloud resample(const ParticleCloud& cloud, std::span<const double> weights, std::size_t n_p,
                       std::uint64_t master_seed);

ParticleCloud augment(const ParticleCloud& cloud, const KernelSpec& kernel, std::size_t n_b,
                      std::uint64_t master_seed, std::int64_t day);

struct FilterConfig {
    CloudSizes sizes;
    PriorSpec prior;
    KernelSpec kernel;
    WeighOptions weigh;
    std::uint64_t master_seed = 20200229;
};

void require_valid(const FilterConfig& cfg);

// One day of the augmented sampler: augment (skipped on the first step, whose
// cloud holds prior draws), weigh, normalize, resample.
FilterOutput step_filter(ParticleCloud& cloud, const Observation& obs_next, const FilterConfig& cfg);

class ParticleFilter {
public:
    ParticleFilter(FilterConfig cfg, const StateVector& init_state, std::int64_t start_day = 0);

    FilterOutput step(const Observation& obs);

    const ParticleCloud& cloud() const { return cloud_; }
    const FilterConfig& config() const { return cfg_; }

private:
    FilterConfig cfg_;
    ParticleCloud cloud_;
};

}  // namespace seirdmon
