#include "model/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "common/error.hpp"

namespace seirdmon {

namespace {

// Stirling series remainder: lgamma(n + 1) - [(n + 1/2) log n - n + log sqrt(2 pi)].
double stirling_error(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        const double log_sqrt_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - log_sqrt_2pi;
    }
    const double nn = n * n;
    if (n > 500.0) return (s0 - s1 / nn) / n;
    if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term k log(k / lambda) + lambda - k, evaluated without cancellation
// when k and lambda are close.
double deviance_term(double k, double lambda) {
    if (std::fabs(k - lambda) < 0.1 * (k + lambda)) {
        double v = (k - lambda) / (k + lambda);
        double s = (k - lambda) * v;
        double ej = 2.0 * k * v;
        const double v2 = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double next = s + ej / (2 * j + 1);
            if (next == s) return next;
            s = next;
        }
        return s;
    }
    return k * std::log(k / lambda) + lambda - k;
}

}  // namespace

double poisson_logpmf(std::int64_t k, double lambda) {
    if (k < 0 || !(lambda >= 0.0)) raise(ErrorKind::Domain, "poisson_logpmf requires k >= 0 and lambda >= 0");
    if (std::isinf(lambda)) return -std::numeric_limits<double>::infinity();
    if (lambda == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (k == 0) return -lambda;
    const double x = static_cast<double>(k);
    return -stirling_error(x) - deviance_term(x, lambda) - 0.5 * std::log(2.0 * std::numbers::pi * x);
}

double obs_loglik(const Observation& obs, const StateVector& means) {
    return poisson_logpmf(obs.infected, means.i) + poisson_logpmf(obs.recovered, means.r) +
           poisson_logpmf(obs.deaths, means.d);
}

}  // namespace seirdmon
