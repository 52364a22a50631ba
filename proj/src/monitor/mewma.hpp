#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "model/seird.hpp"

namespace seirdmon {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;
using DeltaMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

// Monitored coordinates, in order: (alpha, gamma, beta, eta).
Vector4 monitor_coordinates(const ParamVector& p);

inline constexpr double kDefaultControlLimit = 9.48;
inline constexpr double kRidgeEpsilon = 1e-10;

// Index-paired day-over-day differences of the posterior samples, with their
// column means and (centered, 1/(n - 1)) covariance.
struct DeltaSample {
    std::int64_t day = 0;
    DeltaMatrix deltas;
    Vector4 mean = Vector4::Zero();
    Matrix4 cov = Matrix4::Zero();
};

DeltaSample difference_samples(std::span<const ParamVector> curr, std::span<const ParamVector> prev,
                               std::int64_t day);

struct MewmaState {
    std::int64_t day = 0;
    Vector4 mewma = Vector4::Zero();
    Matrix4 v = Matrix4::Zero();
    double lambda = 0.2;
    double t2 = 0.0;
    bool signaled = false;
};

// MEWMA starts on target (zero) and V starts at the first delta's covariance.
MewmaState initial_state(const DeltaSample& first, double lambda);

MewmaState mewma_update(const MewmaState& state, const DeltaSample& delta);

// mewma' V^-1 mewma via an LDLT solve on the ridge-regularized V.
double t2(const MewmaState& state);

bool check_signal(const MewmaState& state, double limit);

// Chi-square(4) 0.95 quantile.
double default_control_limit();

struct MonitorRecord {
    std::int64_t day = 0;
    Vector4 mewma = Vector4::Zero();
    double t2 = 0.0;
    bool signaled = false;
};

// Streaming chart over successive days of posterior samples.
class MewmaMonitor {
public:
    MewmaMonitor(double lambda, double limit);

    // Returns a record from the second pushed day onward.
    std::optional<MonitorRecord> push(std::int64_t day, std::span<const ParamVector> samples);

    double lambda() const { return lambda_; }
    double limit() const { return limit_; }
    const std::vector<MonitorRecord>& history() const { return history_; }

private:
    double lambda_;
    double limit_;
    std::int64_t prev_day_ = 0;
    std::vector<ParamVector> prev_;
    std::optional<MewmaState> state_;
    std::vector<MonitorRecord> history_;
};

}  // namespace seirdmon
