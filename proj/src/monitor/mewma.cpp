#include "monitor/mewma.hpp"

#include <cmath>
#include <string>

#include "common/error.hpp"
#include "monitor/chi_square.hpp"

namespace seirdmon {

Vector4 monitor_coordinates(const ParamVector& p) { return {p.alpha, p.gamma, p.beta, p.eta}; }

DeltaSample difference_samples(std::span<const ParamVector> curr, std::span<const ParamVector> prev,
                               std::int64_t day) {
    if (curr.size() != prev.size())
        raise(ErrorKind::Dimension, "sample count mismatch: " + std::to_string(curr.size()) + " vs " +
                                        std::to_string(prev.size()));
    if (curr.empty()) raise(ErrorKind::Dimension, "no samples to difference");
    const auto n = static_cast<Eigen::Index>(curr.size());
    DeltaSample out;
    out.day = day;
    out.deltas.resize(n, 4);
    for (Eigen::Index i = 0; i < n; ++i)
        out.deltas.row(i) = (monitor_coordinates(curr[i]) - monitor_coordinates(prev[i])).transpose();
    out.mean = out.deltas.colwise().mean().transpose();
    if (n > 1) {
        const DeltaMatrix centered = out.deltas.rowwise() - out.mean.transpose();
        out.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    }
    return out;
}

MewmaState initial_state(const DeltaSample& first, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0)) raise(ErrorKind::InvalidArgument, "lambda must lie in (0, 1]");
    MewmaState s;
    s.day = first.day - 1;
    s.lambda = lambda;
    s.v = first.cov;
    return s;
}

MewmaState mewma_update(const MewmaState& state, const DeltaSample& delta) {
    const double l = state.lambda;
    MewmaState next = state;
    next.day = delta.day;
    next.mewma = l * delta.mean + (1.0 - l) * state.mewma;
    next.v = l * l * delta.cov + (1.0 - l) * (1.0 - l) * state.v;
    next.v = 0.5 * (next.v + next.v.transpose());
    next.t2 = 0.0;
    next.signaled = false;
    return next;
}

double t2(const MewmaState& state) {
    if (state.mewma.isZero(0.0)) return 0.0;
    const double trace = state.v.trace();
    if (!(trace > 0.0) || !std::isfinite(trace))
        raise(ErrorKind::SingularCovariance, "moving covariance is zero on day " + std::to_string(state.day));
    Matrix4 v = state.v;
    v.diagonal().array() += kRidgeEpsilon * trace / 4.0;
    const Eigen::LDLT<Matrix4> ldlt(v);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        raise(ErrorKind::SingularCovariance, "moving covariance not positive definite on day " +
                                                 std::to_string(state.day));
    const Vector4 x = ldlt.solve(state.mewma);
    const double q = state.mewma.dot(x);
    if (!std::isfinite(q) || q < 0.0)
        raise(ErrorKind::SingularCovariance, "T2 solve failed on day " + std::to_string(state.day));
    return q;
}

bool check_signal(const MewmaState& state, double limit) { return state.t2 > limit; }

double default_control_limit() { return chi_square_quantile(0.95, 4.0); }

MewmaMonitor::MewmaMonitor(double lambda, double limit) : lambda_(lambda), limit_(limit) {
    if (!(lambda > 0.0 && lambda <= 1.0)) raise(ErrorKind::InvalidArgument, "lambda must lie in (0, 1]");
    if (!(limit > 0.0)) raise(ErrorKind::InvalidArgument, "control limit must be positive");
}

std::optional<MonitorRecord> MewmaMonitor::push(std::int64_t day, std::span<const ParamVector> samples) {
    if (prev_.empty()) {
        prev_.assign(samples.begin(), samples.end());
        prev_day_ = day;
        return std::nullopt;
    }
    if (day != prev_day_ + 1)
        raise(ErrorKind::InvalidArgument, "monitor expects consecutive days, got " + std::to_string(day) +
                                              " after " + std::to_string(prev_day_));
    const DeltaSample delta = difference_samples(samples, prev_, day);
    if (!state_) state_ = initial_state(delta, lambda_);
    MewmaState next = mewma_update(*state_, delta);
    next.t2 = t2(next);
    next.signaled = check_signal(next, limit_);
    state_ = next;
    prev_.assign(samples.begin(), samples.end());
    prev_day_ = day;
    MonitorRecord rec{day, next.mewma, next.t2, next.signaled};
    history_.push_back(rec);
    return rec;
}

}  // namespace seirdmon
