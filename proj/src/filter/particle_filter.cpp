#include "filter/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "filter/rng_streams.hpp"

namespace seirdmon {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_exponential(double x, double mean) { return -std::log(mean) - x / mean; }

double log_lognormal_step(double parent, double child, double sigma) {
    // Degenerate coordinate: a zero rate stays zero and contributes no density.
    if (parent == 0.0) return 0.0;
    const double z = (std::log(child) - std::log(parent)) / sigma;
    return -std::log(child) - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
}

}  // namespace

void require_valid(const PriorSpec& prior) {
    for (double m : {prior.mean_alpha, prior.mean_beta, prior.mean_gamma, prior.mean_eta})
        if (!(m > 0.0) || !std::isfinite(m)) raise(ErrorKind::InvalidArgument, "prior means must be positive");
}

double log_prior_density(const PriorSpec& prior, const ParamVector& p) {
    return log_exponential(p.alpha, prior.mean_alpha) + log_exponential(p.beta, prior.mean_beta) +
           log_exponential(p.gamma, prior.mean_gamma) + log_exponential(p.eta, prior.mean_eta);
}

void require_valid(const KernelSpec& kernel) {
    if (!(kernel.sigma_log > 0.0) || !std::isfinite(kernel.sigma_log))
        raise(ErrorKind::InvalidArgument, "sigma_log must be positive");
}

double log_kernel_density(const KernelSpec& kernel, const ParamVector& parent, const ParamVector& child) {
    const double s = kernel.sigma_log;
    return log_lognormal_step(parent.alpha, child.alpha, s) + log_lognormal_step(parent.beta, child.beta, s) +
           log_lognormal_step(parent.gamma, child.gamma, s) + log_lognormal_step(parent.eta, child.eta, s);
}

ParticleCloud init_cloud(const PriorSpec& prior, const StateVector& init_state, std::size_t n_c,
                         std::uint64_t master_seed) {
    require_valid(prior);
    require_valid(init_state);
    if (n_c < 1) raise(ErrorKind::InvalidArgument, "n_c must be >= 1");
    ParticleCloud cloud;
    cloud.day = 0;
    cloud.sizes.n_c = n_c;
    cloud.particles.resize(n_c);
    for (std::size_t j = 0; j < n_c; ++j) {
        auto rng = make_stream(master_seed, 0, StreamPurpose::Init, j);
        std::exponential_distribution<double> unit(1.0);
        Particle& pt = cloud.particles[j];
        pt.params = {prior.mean_alpha * unit(rng), prior.mean_beta * unit(rng), prior.mean_gamma * unit(rng),
                     prior.mean_eta * unit(rng)};
        pt.state = init_state;
        pt.log_proposal = log_prior_density(prior, pt.params);
        pt.log_weight = 0.0;
    }
    return cloud;
}

void weigh(ParticleCloud& cloud, const Observation& next_obs, const PriorSpec& prior, const WeighOptions& opts) {
    if (next_obs.day != cloud.day + 1)
        raise(ErrorKind::InvalidArgument, "observation day " + std::to_string(next_obs.day) +
                                              " does not follow cloud day " + std::to_string(cloud.day));
    parallel_for(cloud.particles.size(), opts.threads, [&](std::size_t j) {
        Particle& pt = cloud.particles[j];
        pt.state = integrate_day(pt.state, pt.params, opts.substeps);
        double lw = obs_loglik(next_obs, pt.state);
        if (opts.prior_correction) lw += log_prior_density(prior, pt.params) - pt.log_proposal;
        pt.log_weight = std::isnan(lw) ? kNegInf : lw;
    });
    cloud.day = next_obs.day;
    const bool any_finite = std::any_of(cloud.particles.begin(), cloud.particles.end(),
                                        [](const Particle& p) { return std::isfinite(p.log_weight); });
    if (!any_finite) raise(ErrorKind::Depletion, "all particle weights vanished on day " + std::to_string(cloud.day));
}

NormalizedWeights normalize(std::span<const double> log_weights) {
    double top = kNegInf;
    for (double lw : log_weights)
        if (std::isfinite(lw)) top = std::max(top, lw);
    if (!std::isfinite(top)) raise(ErrorKind::Depletion, "no finite log-weight to normalize");
    NormalizedWeights out;
    out.weights.resize(log_weights.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < log_weights.size(); ++j) {
        const double lw = log_weights[j];
        const double w = (lw == std::numeric_limits<double>::infinity()) ? 0.0 : std::exp(lw - top);
        out.weights[j] = w;
        sum += w;
    }
    double sum_sq = 0.0;
    for (double& w : out.weights) {
        w /= sum;
        sum_sq += w * w;
    }
    out.ess = 1.0 / sum_sq;
    return out;
}

NormalizedWeights normalize(const ParticleCloud& cloud) {
    std::vector<double> lw(cloud.particles.size());
    std::transform(cloud.particles.begin(), cloud.particles.end(), lw.begin(),
                   [](const Particle& p) { return p.log_weight; });
    return normalize(lw);
}

std::vector<std::size_t> multinomial_ancestors(std::span<const double> weights, std::size_t n,
                                               std::uint64_t master_seed, std::int64_t day) {
    if (weights.empty()) raise(ErrorKind::InvalidArgument, "cannot resample an empty cloud");
    std::vector<double> cumulative(weights.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        cumulative[j] = acc;
    }
    auto rng = make_stream(master_seed, day, StreamPurpose::Resample);
    std::uniform_real_distribution<double> unif(0.0, acc);
    std::vector<std::size_t> ancestors(n);
    for (auto& a : ancestors) {
        const double u = unif(rng);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= weights.size()) idx = weights.size() - 1;
        // upper_bound never lands on a zero-weight slot unless it is the tail.
        while (weights[idx] == 0.0 && idx > 0) --idx;
        a = idx;
    }
    return ancestors;
}

ParticleCloud resample(const ParticleCloud& cloud, std::span<const double> weights, std::size_t n_p,
                       std::uint64_t master_seed) {
    if (weights.size() != cloud.particles.size())
        raise(ErrorKind::Dimension, "weight count does not match particle count");
    if (n_p < 1) raise(ErrorKind::InvalidArgument, "n_p must be >= 1");
    const auto ancestors = multinomial_ancestors(weights, n_p, master_seed, cloud.day);
    ParticleCloud out;
    out.day = cloud.day;
    out.sizes = cloud.sizes;
    out.sizes.n_p = n_p;
    out.resampled = true;
    out.particles.reserve(n_p);
    for (std::size_t a : ancestors) {
        Particle pt = cloud.particles[a];
        pt.log_weight = 0.0;
        out.particles.push_back(pt);
    }
    return out;
}

ParticleCloud augment(const ParticleCloud& cloud, const KernelSpec& kernel, std::size_t n_b,
                      std::uint64_t master_seed, std::int64_t day) {
    require_valid(kernel);
    if (n_b < 1) raise(ErrorKind::InvalidArgument, "n_b must be >= 1");
    ParticleCloud out;
    out.day = cloud.day;
    out.sizes = cloud.sizes;
    out.sizes.n_b = n_b;
    out.resampled = false;
    out.particles.resize(cloud.particles.size() * n_b);
    const double s = kernel.sigma_log;
    for (std::size_t l = 0; l < cloud.particles.size(); ++l) {
        const Particle& parent = cloud.particles[l];
        auto rng = make_stream(master_seed, day, StreamPurpose::Augment, l);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = 0; j < n_b; ++j) {
            Particle& child = out.particles[l * n_b + j];
            const ParamVector& q = parent.params;
            child.params = {q.alpha * std::exp(s * normal(rng)), q.beta * std::exp(s * normal(rng)),
                            q.gamma * std::exp(s * normal(rng)), q.eta * std::exp(s * normal(rng))};
            child.state = parent.state;
            child.log_weight = 0.0;
            child.log_proposal = log_kernel_density(kernel, q, child.params);
        }
    }
    return out;
}

void require_valid(const FilterConfig& cfg) {
    if (cfg.sizes.n_c < 1 || cfg.sizes.n_p < 1 || cfg.sizes.n_b < 1)
        raise(ErrorKind::InvalidArgument, "n_c, n_p and n_b must be >= 1");
    if (cfg.weigh.substeps < 1) raise(ErrorKind::InvalidArgument, "substeps must be >= 1");
    require_valid(cfg.prior);
    require_valid(cfg.kernel);
}

FilterOutput step_filter(ParticleCloud& cloud, const Observation& obs_next, const FilterConfig& cfg) {
    // A cloud that was never resampled still holds the n_c prior draws.
    if (cloud.resampled) cloud = augment(cloud, cfg.kernel, cfg.sizes.n_b, cfg.master_seed, obs_next.day);
    weigh(cloud, obs_next, cfg.prior, cfg.weigh);
    const NormalizedWeights nw = normalize(cloud);
    cloud = resample(cloud, nw.weights, cfg.sizes.n_p, cfg.master_seed);

    FilterOutput out;
    out.day = cloud.day;
    out.ess = nw.ess;
    out.posterior_samples.reserve(cloud.particles.size());
    out.predictive_means.reserve(cloud.particles.size());
    for (const Particle& pt : cloud.particles) {
        out.posterior_samples.push_back(pt.params);
        out.predictive_means.push_back(pt.state);
    }
    return out;
}

ParticleFilter::ParticleFilter(FilterConfig cfg, const StateVector& init_state, std::int64_t start_day)
    : cfg_(cfg) {
    require_valid(cfg_);
    cloud_ = init_cloud(cfg_.prior, init_state, cfg_.sizes.n_c, cfg_.master_seed);
    cloud_.day = start_day;
    cloud_.sizes = cfg_.sizes;
}

FilterOutput ParticleFilter::step(const Observation& obs) { return step_filter(cloud_, obs, cfg_); }

}  // namespace seirdmon
