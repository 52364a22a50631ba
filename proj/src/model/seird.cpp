#include "model/seird.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"

namespace seirdmon {

namespace {

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

StateVector axpy(const StateVector& x, double h, const StateRates& k) {
    return {x.s + h * k.s, x.e + h * k.e, x.i + h * k.i, x.r + h * k.r, x.d + h * k.d};
}

void check_finite(const StateVector& x) {
    const char* bad = nullptr;
    if (!std::isfinite(x.s)) bad = "S";
    else if (!std::isfinite(x.e)) bad = "E";
    else if (!std::isfinite(x.i)) bad = "I";
    else if (!std::isfinite(x.r)) bad = "R";
    else if (!std::isfinite(x.d)) bad = "D";
    if (bad) raise(ErrorKind::Integration, std::string("non-finite value in compartment ") + bad);
}

double clamp_zero(double v, std::uint64_t& count) {
    if (v < 0.0) {
        ++count;
        return 0.0;
    }
    return v;
}

}  // namespace

bool is_valid(const ParamVector& p) {
    return nonneg_finite(p.alpha) && nonneg_finite(p.beta) && nonneg_finite(p.gamma) && nonneg_finite(p.eta);
}

bool is_valid(const StateVector& x) {
    return nonneg_finite(x.s) && nonneg_finite(x.e) && nonneg_finite(x.i) && nonneg_finite(x.r) &&
           nonneg_finite(x.d);
}

void require_valid(const ParamVector& p) {
    if (!is_valid(p)) raise(ErrorKind::InvalidArgument, "rates must be finite and non-negative");
}

void require_valid(const StateVector& x) {
    if (!is_valid(x)) raise(ErrorKind::InvalidArgument, "compartments must be finite and non-negative");
}

StateRates seird_rhs(const StateVector& x, const ParamVector& p) {
    const double infection = p.alpha * x.s * x.e;
    return {
        -infection,
        infection - p.beta * x.e - p.gamma * x.e,
        p.beta * x.e - p.gamma * x.i - p.eta * x.i,
        p.gamma * x.i,
        p.eta * x.i,
    };
}

StateVector integrate_day(const StateVector& x0, const ParamVector& p, int substeps, IntegrationStats* stats) {
    if (substeps < 1) raise(ErrorKind::InvalidArgument, "substeps must be >= 1");
    const double h = 1.0 / substeps;
    std::uint64_t clamped = 0;
    StateVector x = x0;
    for (int n = 0; n < substeps; ++n) {
        const StateRates k1 = seird_rhs(x, p);
        const StateRates k2 = seird_rhs(axpy(x, 0.5 * h, k1), p);
        const StateRates k3 = seird_rhs(axpy(x, 0.5 * h, k2), p);
        const StateRates k4 = seird_rhs(axpy(x, h, k3), p);
        const double w = h / 6.0;
        x.s += w * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        x.e += w * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
        x.i += w * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
        x.r += w * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
        x.d += w * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
        check_finite(x);
        x.s = clamp_zero(x.s, clamped);
        x.e = clamp_zero(x.e, clamped);
        x.i = clamp_zero(x.i, clamped);
        x.r = clamp_zero(x.r, clamped);
        x.d = clamp_zero(x.d, clamped);
    }
    if (stats) stats->clamped += clamped;
    return x;
}

double compute_r0(const ParamVector& p) {
    const double denom = p.beta + p.gamma;
    if (!(denom > 0.0)) raise(ErrorKind::Domain, "R0 undefined: beta + gamma = 0");
    return p.alpha / denom;
}

Trajectory integrate_trajectory(const StateVector& init, const ParamSchedule& schedule, std::int64_t days,
                                int substeps) {
    require_valid(init);
    Trajectory traj;
    traj.states.reserve(static_cast<std::size_t>(days) + 1);
    traj.states.push_back(init);
    for (std::int64_t d = 0; d < days; ++d) {
        const ParamVector p = schedule(d);
        require_valid(p);
        traj.states.push_back(integrate_day(traj.states.back(), p, substeps));
    }
    return traj;
}

}  // namespace seirdmon
