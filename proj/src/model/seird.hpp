#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace seirdmon {

// Time-varying SEIRD rates. alpha is per day per individual (mass action on
// S*E); beta, gamma and eta are per day.
struct ParamVector {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// Compartment occupancies. Real-valued: these are the Poisson means, not counts.
struct StateVector {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;

    friend bool operator==(const StateVector&, const StateVector&) = default;
};

// Per-day rates of change of each compartment.
struct StateRates {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;

    double total() const { return s + e + i + r + d; }
};

bool is_valid(const ParamVector& p);
bool is_valid(const StateVector& x);
void require_valid(const ParamVector& p);
void require_valid(const StateVector& x);

StateRates seird_rhs(const StateVector& x, const ParamVector& p);

struct IntegrationStats {
    std::uint64_t clamped = 0;  // compartments clamped to zero after a substep
};

inline constexpr int kDefaultSubsteps = 10;

// Advances one day with classical RK4 at h = 1/substeps. Compartments that
// undershoot zero are clamped after every substep.
StateVector integrate_day(const StateVector& x, const ParamVector& p, int substeps = kDefaultSubsteps,
                          IntegrationStats* stats = nullptr);

double compute_r0(const ParamVector& p);

struct Trajectory {
    std::int64_t start_day = 0;
    std::vector<StateVector> states;  // states[k] is day start_day + k
};

// Rates in force while integrating from day d to d + 1.
using ParamSchedule = std::function<ParamVector(std::int64_t day)>;

Trajectory integrate_trajectory(const StateVector& init, const ParamSchedule& schedule, std::int64_t days,
                                int substeps = kDefaultSubsteps);

}  // namespace seirdmon
