#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "common/error.hpp"
#include "filter/particle_filter.hpp"
#include "model/likelihood.hpp"
#include "report/simulate.hpp"

using namespace seirdmon;

namespace {

const StateVector kQatarInit{2782000.0, 3.0, 1.0, 0.0, 0.0};

double chi2_critical(double dof, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

ParticleCloud cloud_of(std::vector<ParamVector> params, const StateVector& state) {
    ParticleCloud c;
    for (const auto& p : params) c.particles.push_back(Particle{p, state, 0.0, 0.0});
    return c;
}

}  // namespace

TEST_CASE("init_cloud: Qatar defaults") {
    const auto cloud = init_cloud(PriorSpec{}, kQatarInit, 10000, 1);
    REQUIRE(cloud.particles.size() == 10000);
    CHECK(cloud.day == 0);
    CHECK_FALSE(cloud.resampled);
    for (const auto& p : cloud.particles) {
        CHECK(p.state == kQatarInit);
        CHECK(is_valid(p.params));
    }
}

TEST_CASE("init_cloud: prior draws match Exponential moments") {
    const PriorSpec prior{2.0 / 4450000.0, 1.0 / 105.0, 1.0 / 14.0, 1.0 / 9500.0};
    const std::size_t n = 100000;
    const auto cloud = init_cloud(prior, kQatarInit, n, 77);
    double sum[4] = {0, 0, 0, 0};
    for (const auto& p : cloud.particles) {
        sum[0] += p.params.alpha;
        sum[1] += p.params.beta;
        sum[2] += p.params.gamma;
        sum[3] += p.params.eta;
    }
    const double means[4] = {prior.mean_alpha, prior.mean_beta, prior.mean_gamma, prior.mean_eta};
    for (int c = 0; c < 4; ++c) {
        const double se = means[c] / std::sqrt(static_cast<double>(n));  // sd of Exp equals its mean
        CHECK(std::abs(sum[c] / n - means[c]) <= 3.0 * se);
    }
}

TEST_CASE("init_cloud: deterministic in the seed") {
    const auto a = init_cloud(PriorSpec{}, kQatarInit, 500, 9);
    const auto b = init_cloud(PriorSpec{}, kQatarInit, 500, 9);
    const auto c = init_cloud(PriorSpec{}, kQatarInit, 500, 10);
    bool same = true, differs = false;
    for (std::size_t j = 0; j < 500; ++j) {
        same = same && a.particles[j].params == b.particles[j].params;
        differs = differs || !(a.particles[j].params == c.particles[j].params);
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("weigh: single particle normalizes to weight one") {
    auto cloud = cloud_of({{1e-7, 0.1, 0.05, 0.001}}, kQatarInit);
    weigh(cloud, {1, 3, 0, 0}, PriorSpec{}, {});
    const auto nw = normalize(cloud);
    CHECK(nw.weights[0] == 1.0);
    CHECK(nw.ess == 1.0);
}

TEST_CASE("weigh: the particle whose means match the data scores higher") {
    const StateVector x{1000, 0, 50, 20, 2};
    const ParamVector still{0, 0, 0, 0};        // means stay at (50, 20, 2)
    const ParamVector off{0, 0, 0.9, 0.5};      // drains I fast
    auto cloud = cloud_of({still, off}, x);
    weigh(cloud, {1, 50, 20, 2}, PriorSpec{}, {});
    CHECK(cloud.particles[0].log_weight > cloud.particles[1].log_weight);
}

TEST_CASE("weigh: log-weights match a hand oracle with prior and kernel terms") {
    const PriorSpec prior{2e-7, 0.1, 0.07, 1e-4};
    const KernelSpec kernel{0.1};
    const ParamVector parent{3e-7, 0.14, 0.07, 0.005};
    const std::vector<ParamVector> kids = {
        {3.1e-7, 0.15, 0.068, 0.0052}, {2.8e-7, 0.13, 0.075, 0.0049}, {3.3e-7, 0.141, 0.071, 0.0047}};
    const StateVector x{2e6, 40, 30, 5, 1};
    const Observation obs{6, 33, 7, 1};

    ParticleCloud cloud;
    cloud.day = 5;
    for (const auto& k : kids) cloud.particles.push_back({k, x, 0.0, log_kernel_density(kernel, parent, k)});
    WeighOptions opts;
    opts.prior_correction = true;
    weigh(cloud, obs, prior, opts);

    auto ln_exp = [](double v, double mean) { return -std::log(mean) - v / mean; };
    auto ln_lognormal = [&](double from, double to) {
        const double z = std::log(to / from) / kernel.sigma_log;
        return -std::log(to) - std::log(kernel.sigma_log) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
    };
    auto ln_pois = [](double k, double lam) { return k * std::log(lam) - lam - std::lgamma(k + 1.0); };
    for (std::size_t j = 0; j < kids.size(); ++j) {
        const ParamVector& k = kids[j];
        const StateVector m = integrate_day(x, k, kDefaultSubsteps);
        const double expect = ln_pois(33, m.i) + ln_pois(7, m.r) + ln_pois(1, m.d) + ln_exp(k.alpha, prior.mean_alpha) +
                              ln_exp(k.beta, prior.mean_beta) + ln_exp(k.gamma, prior.mean_gamma) +
                              ln_exp(k.eta, prior.mean_eta) - ln_lognormal(parent.alpha, k.alpha) -
                              ln_lognormal(parent.beta, k.beta) - ln_lognormal(parent.gamma, k.gamma) -
                              ln_lognormal(parent.eta, k.eta);
        CHECK(cloud.particles[j].log_weight == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(cloud.particles[j].log_weight - expect) <= 1e-10);
        CHECK(cloud.particles[j].state == m);
    }
    CHECK(cloud.day == 6);
}

TEST_CASE("weigh: prior draws carry no correction") {
    const PriorSpec prior{};
    auto cloud = init_cloud(prior, kQatarInit, 50, 4);
    auto plain = cloud;
    WeighOptions on;
    on.prior_correction = true;
    weigh(cloud, {1, 2, 0, 0}, prior, on);
    weigh(plain, {1, 2, 0, 0}, prior, {});
    for (std::size_t j = 0; j < 50; ++j)
        CHECK(cloud.particles[j].log_weight == doctest::Approx(plain.particles[j].log_weight).epsilon(1e-12));
}

TEST_CASE("weigh: impossible data raises depletion") {
    auto cloud = cloud_of({{0, 0, 0, 0}, {0, 0, 0, 0}}, {100, 0, 0, 0, 0});
    try {
        weigh(cloud, {1, 5, 0, 0}, PriorSpec{}, {});
        FAIL("expected depletion");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Depletion);
    }
}

TEST_CASE("weigh: observation must follow the cloud day") {
    auto cloud = cloud_of({{0, 0, 0, 0}}, kQatarInit);
    CHECK_THROWS_AS(weigh(cloud, {3, 1, 0, 0}, PriorSpec{}, {}), Error);
}

TEST_CASE("weigh: thread count does not change results") {
    auto a = init_cloud(PriorSpec{}, kQatarInit, 2000, 5);
    auto b = a;
    WeighOptions one, four;
    four.threads = 4;
    weigh(a, {1, 4, 0, 0}, PriorSpec{}, one);
    weigh(b, {1, 4, 0, 0}, PriorSpec{}, four);
    for (std::size_t j = 0; j < a.particles.size(); ++j) CHECK(a.particles[j].log_weight == b.particles[j].log_weight);
}

TEST_CASE("normalize: uniform, shifted and hand-computed weights") {
    const std::vector<double> uniform(8, -3.0);
    const auto u = normalize(uniform);
    for (double w : u.weights) CHECK(w == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(u.ess == doctest::Approx(8.0).epsilon(1e-12));

    const std::vector<double> lw = {0.0, -1.0, -2.0};
    std::vector<double> shifted = lw;
    for (double& x : shifted) x += 1000.0;
    const auto a = normalize(lw);
    const auto b = normalize(shifted);
    const double z = 1.0 + std::exp(-1.0) + std::exp(-2.0);
    CHECK(a.weights[0] == doctest::Approx(1.0 / z).epsilon(1e-14));
    CHECK(a.weights[1] == doctest::Approx(std::exp(-1.0) / z).epsilon(1e-14));
    CHECK(a.weights[2] == doctest::Approx(std::exp(-2.0) / z).epsilon(1e-14));
    for (int j = 0; j < 3; ++j) CHECK(a.weights[j] == doctest::Approx(b.weights[j]).epsilon(1e-15));
}

TEST_CASE("normalize: sums to one and bounds the ESS") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 30.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> lw(1000);
        for (double& x : lw) x = z(rng);
        lw[3] = -std::numeric_limits<double>::infinity();
        const auto nw = normalize(lw);
        CHECK(std::abs(std::accumulate(nw.weights.begin(), nw.weights.end(), 0.0) - 1.0) <= 1e-12);
        CHECK(nw.ess >= 1.0 - 1e-12);
        CHECK(nw.ess <= 1000.0 + 1e-9);
        CHECK(nw.weights[3] == 0.0);
    }
}

TEST_CASE("normalize: all -inf raises depletion") {
    const std::vector<double> lw(4, -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(normalize(lw), Error);
}

TEST_CASE("resample: a single unit weight takes every slot") {
    const std::vector<double> w = {0.0, 0.0, 1.0, 0.0};
    const auto anc = multinomial_ancestors(w, 1000, 3, 1);
    CHECK(std::all_of(anc.begin(), anc.end(), [](std::size_t a) { return a == 2; }));
}

TEST_CASE("resample: uniform weights pass a chi-square GOF test") {
    const std::size_t k = 10, n = 100000;
    const std::vector<double> w(k, 1.0 / k);
    const auto anc = multinomial_ancestors(w, n, 12345, 7);
    std::vector<double> counts(k, 0.0);
    for (auto a : anc) counts[a] += 1.0;
    double stat = 0.0;
    const double expect = static_cast<double>(n) / k;
    for (double c : counts) stat += (c - expect) * (c - expect) / expect;
    CHECK(stat < chi2_critical(k - 1, 0.001));
}

TEST_CASE("resample: deterministic ancestors and carried state") {
    const std::vector<double> w = {0.2, 0.5, 0.3};
    CHECK(multinomial_ancestors(w, 200, 8, 4) == multinomial_ancestors(w, 200, 8, 4));

    auto cloud = cloud_of({{1e-7, 0.1, 0.1, 0.01}, {2e-7, 0.2, 0.2, 0.02}, {3e-7, 0.3, 0.3, 0.03}}, kQatarInit);
    for (std::size_t j = 0; j < 3; ++j) cloud.particles[j].state.e = 10.0 * static_cast<double>(j + 1);
    const auto out = resample(cloud, w, 50, 8);
    CHECK(out.particles.size() == 50);
    CHECK(out.resampled);
    for (const auto& p : out.particles) {
        const auto j = static_cast<std::size_t>(std::lround(p.params.beta * 10.0)) - 1;
        CHECK(p.state.e == doctest::Approx(10.0 * static_cast<double>(j + 1)));
        CHECK(p.log_weight == 0.0);
    }
}

TEST_CASE("augment: sizes, degenerate kernel and child moments") {
    auto parents = cloud_of(std::vector<ParamVector>(1000, ParamVector{3e-7, 0.14, 0.07, 0.005}), kQatarInit);
    parents.resampled = true;
    const auto kids = augment(parents, KernelSpec{0.1}, 10, 5, 3);
    CHECK(kids.particles.size() == 10000);
    CHECK_FALSE(kids.resampled);

    const auto frozen = augment(parents, KernelSpec{1e-12}, 3, 5, 3);
    for (const auto& c : frozen.particles) {
        CHECK(std::abs(c.params.alpha / 3e-7 - 1.0) <= 1e-8);
        CHECK(std::abs(c.params.eta / 0.005 - 1.0) <= 1e-8);
        CHECK(c.state == kQatarInit);
    }

    auto one = cloud_of({{3e-7, 0.14, 0.07, 0.005}}, kQatarInit);
    const double sigma = 0.1;
    const std::size_t n = 100000;
    const auto many = augment(one, KernelSpec{sigma}, n, 99, 2);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& c : many.particles) {
        const double l = std::log(c.params.gamma / 0.07);
        sum += l;
        sum_sq += l * l;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sd - sigma) <= 3.0 * sigma / std::sqrt(2.0 * static_cast<double>(n)));
}

TEST_CASE("step_filter: zero data from a disease-free start keeps uniform weights") {
    FilterConfig cfg;
    cfg.sizes = {200, 50, 4};
    ParticleFilter pf(cfg, {1000, 0, 0, 0, 0});
    for (std::int64_t d = 1; d <= 5; ++d) {
        const auto out = pf.step({d, 0, 0, 0});
        CHECK(out.day == d);
        CHECK(out.posterior_samples.size() == 50);
        CHECK(out.ess == doctest::Approx(200.0).epsilon(1e-9));  // 200 prior draws, then 50 x 4 children
    }
}

TEST_CASE("step_filter: lineage validity and determinism") {
    FilterConfig cfg;
    cfg.sizes = {600, 60, 5};
    const auto obs = simulate(PiecewiseSchedule({3e-7, 1.0 / 7.0, 1.0 / 14.0, 1.0 / 200.0}), kQatarInit, 8, 3,
                              parse_iso_date("2020-02-29"));
    ParticleFilter a(cfg, kQatarInit), b(cfg, kQatarInit);
    for (std::int64_t d = 1; d <= 8; ++d) {
        ParticleCloud before = a.cloud();
        if (before.resampled) before = augment(before, cfg.kernel, cfg.sizes.n_b, cfg.master_seed, d);
        weigh(before, obs.observations[static_cast<std::size_t>(d)], cfg.prior, cfg.weigh);

        const auto oa = a.step(obs.observations[static_cast<std::size_t>(d)]);
        const auto ob = b.step(obs.observations[static_cast<std::size_t>(d)]);
        CHECK(oa.posterior_samples == ob.posterior_samples);
        CHECK(oa.ess == ob.ess);
        CHECK(oa.ess >= 1.0);
        CHECK(oa.ess <= static_cast<double>(before.particles.size()) + 1e-9);
        CHECK(a.cloud().particles.size() == 60);
        for (const auto& p : a.cloud().particles) {
            const bool seen = std::any_of(before.particles.begin(), before.particles.end(), [&](const Particle& c) {
                return c.params == p.params && c.state == p.state;
            });
            CHECK(seen);
        }
    }
}

TEST_CASE("require_valid rejects bad filter configs") {
    FilterConfig cfg;
    cfg.sizes.n_p = 0;
    CHECK_THROWS_AS(require_valid(cfg), Error);
    cfg = {};
    cfg.kernel.sigma_log = 0.0;
    CHECK_THROWS_AS(require_valid(cfg), Error);
    cfg = {};
    cfg.prior.mean_beta = -1.0;
    CHECK_THROWS_AS(require_valid(cfg), Error);
}
