#include "report/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "filter/rng_streams.hpp"

namespace seirdmon {
namespace {

template <class T>
T nearest_rank_impl(std::vector<T>& sample, double p) {
    if (sample.empty()) raise(ErrorKind::InvalidArgument, "quantile of an empty sample");
    if (!(p > 0.0 && p <= 1.0)) raise(ErrorKind::InvalidArgument, "quantile level must be in (0, 1]");
    const auto n = static_cast<double>(sample.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sample.size());
    auto nth = sample.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(sample.begin(), nth, sample.end());
    return *nth;
}

// Observation for the day of a summary; the series is indexed by day.
const Observation& observed(const ObservationSeries& obs, std::int64_t day) {
    if (day < 0 || static_cast<std::size_t>(day) >= obs.observations.size())
        raise(ErrorKind::Dimension, "no observation for day " + std::to_string(day));
    return obs.observations[static_cast<std::size_t>(day)];
}

Channels channels(const Observation& o) { return {o.infected, o.recovered, o.deaths}; }

}  // namespace

std::int64_t nearest_rank(std::vector<std::int64_t>& sample, double p) { return nearest_rank_impl(sample, p); }
double nearest_rank(std::vector<double>& sample, double p) { return nearest_rank_impl(sample, p); }

PredictiveSummary predictive_summary(const FilterOutput& samples, std::uint64_t rng_seed) {
    const auto& means = samples.predictive_means;
    if (means.empty()) raise(ErrorKind::InvalidArgument, "predictive summary needs at least one particle");

    std::array<std::vector<std::int64_t>, 3> draws;
    for (auto& d : draws) d.reserve(means.size());
    for (std::size_t j = 0; j < means.size(); ++j) {
        auto rng = make_stream(rng_seed, samples.day, StreamPurpose::Predictive, j);
        const double lambda[3] = {means[j].i, means[j].r, means[j].d};
        for (int c = 0; c < 3; ++c) {
            std::int64_t k = 0;
            if (lambda[c] > 0.0) k = std::poisson_distribution<std::int64_t>(lambda[c])(rng);
            draws[c].push_back(k);
        }
    }

    PredictiveSummary s;
    s.day = samples.day;
    for (int c = 0; c < 3; ++c) {
        s.lower95[c] = nearest_rank(draws[c], 0.025);
        s.median[c] = nearest_rank(draws[c], 0.5);
        s.upper95[c] = nearest_rank(draws[c], 0.975);
    }
    return s;
}

double pseudo_r2(const ObservationSeries& obs, std::span<const PredictiveSummary> fits) {
    if (fits.empty()) raise(ErrorKind::InvalidArgument, "pseudo-R2 needs at least one day");
    std::array<double, 3> mean{};
    for (const auto& f : fits) {
        const Channels y = channels(observed(obs, f.day));
        for (int c = 0; c < 3; ++c) mean[c] += static_cast<double>(y[c]);
    }
    for (double& m : mean) m /= static_cast<double>(fits.size());

    double sse = 0.0, sst = 0.0;
    for (const auto& f : fits) {
        const Channels y = channels(observed(obs, f.day));
        for (int c = 0; c < 3; ++c) {
            const double e = static_cast<double>(y[c] - f.median[c]);
            const double t = static_cast<double>(y[c]) - mean[c];
            sse += e * e;
            sst += t * t;
        }
    }
    if (sst == 0.0) raise(ErrorKind::UndefinedMetric, "pseudo-R2 undefined: observations are constant");
    return 1.0 - sse / sst;
}

double coverage(const ObservationSeries& obs, std::span<const PredictiveSummary> fits) {
    if (fits.empty()) raise(ErrorKind::InvalidArgument, "coverage needs at least one day");
    std::size_t inside = 0;
    for (const auto& f : fits) {
        const Channels y = channels(observed(obs, f.day));
        for (int c = 0; c < 3; ++c)
            if (f.lower95[c] <= y[c] && y[c] <= f.upper95[c]) ++inside;
    }
    return static_cast<double>(inside) / (3.0 * static_cast<double>(fits.size()));
}

ParamQuantiles param_quantiles(const FilterOutput& samples) {
    if (samples.posterior_samples.empty()) raise(ErrorKind::InvalidArgument, "no posterior samples");
    ParamQuantiles q;
    q.day = samples.day;
    std::vector<double> col(samples.posterior_samples.size());
    auto fill = [&](double ParamVector::*field, double& lo, double& mid, double& hi) {
        for (std::size_t j = 0; j < col.size(); ++j) col[j] = samples.posterior_samples[j].*field;
        lo = nearest_rank(col, 0.025);
        mid = nearest_rank(col, 0.5);
        hi = nearest_rank(col, 0.975);
    };
    fill(&ParamVector::alpha, q.lower95.alpha, q.median.alpha, q.upper95.alpha);
    fill(&ParamVector::beta, q.lower95.beta, q.median.beta, q.upper95.beta);
    fill(&ParamVector::gamma, q.lower95.gamma, q.median.gamma, q.upper95.gamma);
    fill(&ParamVector::eta, q.lower95.eta, q.median.eta, q.upper95.eta);
    return q;
}

}  // namespace seirdmon
