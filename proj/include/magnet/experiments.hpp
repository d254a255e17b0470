#pragma once

// Monte Carlo orchestration: trials, RMSE aggregation, failure rates and
// sensor-outage studies.

#include <cstddef>
#include <optional>
#include <vector>

#include "magnet/scenario.hpp"
#include "magnet/sensing.hpp"

namespace magnet {

struct TrialResult {
    /// Position error per step up to and including the failure step, m.
    std::vector<double> errors;
    bool failed = false;
    std::optional<std::size_t> failure_step;

    bool operator==(const TrialResult&) const = default;
};

/// Per-step statistics over the trials still alive at that step.
struct Aggregate {
    std::vector<double> rmse;          ///< NaN where no trial is alive
    std::vector<std::size_t> alive;    ///< trials contributing to each step
    std::size_t trials = 0;
    std::size_t failed = 0;
    double failure_rate = 0.0;

    bool operator==(const Aggregate&) const = default;
};

/// Truth + perturbation (position and velocity) and the configured diagonal covariance.
FilterEstimate initial_estimate(const ScenarioConfig& cfg, const TargetState& truth,
                                std::size_t trial_index);

/// One Monte Carlo realization; deterministic in (master_seed, trial_index).
TrialResult run_trial(const ScenarioConfig& cfg, std::size_t trial_index);

/// Same, on an explicit (for example outage-reduced) array.
TrialResult run_trial(const ScenarioConfig& cfg, const SensorArray& array,
                      std::size_t trial_index);

/// Per-step RMSE over trials that have not failed by that step. Trial order
/// is the summation order, so results are reproducible bit for bit.
Aggregate aggregate_trials(const std::vector<TrialResult>& trials, std::size_t steps);

/// Runs trials 0..runs-1 (cfg.experiment.runs). `threads` = 0 means auto.
/// Output does not depend on the thread count.
Aggregate monte_carlo(const ScenarioConfig& cfg, unsigned threads = 1);

/// Removes `failed_count` sensors chosen uniformly at random; the survivors
/// keep their order. Throws InvalidConfig if failed_count >= array size.
SensorArray apply_outage(const SensorArray& array, std::size_t failed_count, RandomStream& rng);

struct ResilienceRow {
    std::size_t failed_count = 0;
    Aggregate aggregate;
};

/// For every count, each trial gets a fresh outage drawn from its own
/// (master_seed, trial_index) stream, then runs as in monte_carlo.
std::vector<ResilienceRow> resilience_study(const ScenarioConfig& cfg,
                                            const std::vector<std::size_t>& failed_counts,
                                            int runs, unsigned threads = 1);

/// scalar RMSE / vector RMSE per step; NaN where either side is undefined
/// or the vector RMSE is zero. Throws DimensionMismatch on unequal lengths.
std::vector<double> rmse_ratio(const Aggregate& scalar, const Aggregate& vector);

}  // namespace magnet
