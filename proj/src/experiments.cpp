#include "magnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "magnet/errors.hpp"

namespace magnet {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

unsigned resolve_threads(unsigned threads, std::size_t jobs) {
    unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

// Runs job(i) for i in [0, count) on a small pool; each result lands in its own slot.
std::vector<TrialResult> run_indexed(std::size_t count, unsigned threads,
                                     const std::function<TrialResult(std::size_t)>& job) {
    std::vector<TrialResult> results(count);
    const unsigned workers = resolve_threads(threads, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) results[i] = job(i);
            });
        }
    }
    return results;
}

}  // namespace

FilterEstimate initial_estimate(const ScenarioConfig& cfg, const TargetState& truth,
                                std::size_t trial_index) {
    RandomStream rng = RandomStream::derive(cfg.experiment.master_seed, trial_index,
                                            StreamPurpose::kInitialization);
    const FilterSpec& f = cfg.filter;
    FilterEstimate est;
    est.mean = truth.x;
    est.mean(0) += rng.normal(0.0, f.init_position_std);
    est.mean(1) += rng.normal(0.0, f.init_position_std);
    est.mean(2) += rng.normal(0.0, f.vertical_std());
    est.mean(3) += rng.normal(0.0, f.init_velocity_std);
    est.mean(4) += rng.normal(0.0, f.init_velocity_std);
    est.mean(5) += rng.normal(0.0, f.vertical_velocity_std());
    const double h = f.init_position_std;
    const double v = f.vertical_std();
    const double hv = f.init_velocity_std;
    const double vv = f.vertical_velocity_std();
    const double a = f.init_acceleration_std;
    StateVector diag;
    diag << h * h, h * h, v * v, hv * hv, hv * hv, vv * vv, a * a, a * a, a * a;
    est.covariance = diag.asDiagonal();
    return est;
}

TrialResult run_trial(const ScenarioConfig& cfg, std::size_t trial_index) {
    return run_trial(cfg, build_array(cfg), trial_index);
}

TrialResult run_trial(const ScenarioConfig& cfg, const SensorArray& array,
                      std::size_t trial_index) {
    const Trajectory truth = build_trajectory(cfg);
    const FilterEstimate init = initial_estimate(cfg, truth.states.front(), trial_index);
    RandomStream noise = RandomStream::derive(cfg.experiment.master_seed, trial_index,
                                              StreamPurpose::kMeasurementNoise);
    TrackOptions options;
    options.failure_threshold_m = cfg.experiment.failure_threshold_m;
    options.stop_on_failure = true;
    options.keep_estimates = false;
    const TrackResult tr = track(truth, array, cfg.moment, build_ukf_config(cfg),
                                 build_process_model(cfg), init, noise, options);
    TrialResult out;
    out.errors = tr.errors;
    out.failed = tr.failed;
    out.failure_step = tr.failure_step;
    return out;
}

Aggregate aggregate_trials(const std::vector<TrialResult>& trials, std::size_t steps) {
    Aggregate agg;
    agg.trials = trials.size();
    agg.rmse.assign(steps, std::numeric_limits<double>::quiet_NaN());
    agg.alive.assign(steps, 0);
    for (const TrialResult& t : trials) {
        if (t.failed) ++agg.failed;
    }
    agg.failure_rate =
        trials.empty() ? 0.0 : static_cast<double>(agg.failed) / static_cast<double>(trials.size());

    for (std::size_t k = 0; k < steps; ++k) {
        CompensatedSum sum;
        std::size_t n = 0;
        for (const TrialResult& t : trials) {
            const bool alive = !t.failed || (t.failure_step && k < *t.failure_step);
            if (!alive || k >= t.errors.size()) continue;
            sum.add(t.errors[k] * t.errors[k]);
            ++n;
        }
        agg.alive[k] = n;
        if (n > 0) agg.rmse[k] = std::sqrt(sum.value() / static_cast<double>(n));
    }
    return agg;
}

Aggregate monte_carlo(const ScenarioConfig& cfg, unsigned threads) {
    const SensorArray array = build_array(cfg);
    const std::size_t steps = build_trajectory(cfg).size();
    const auto runs = static_cast<std::size_t>(cfg.experiment.runs);
    const auto trials =
        run_indexed(runs, threads, [&](std::size_t i) { return run_trial(cfg, array, i); });
    return aggregate_trials(trials, steps);
}

SensorArray apply_outage(const SensorArray& array, std::size_t failed_count, RandomStream& rng) {
    if (failed_count >= array.size()) {
        throw InvalidConfig("outage would remove all " + std::to_string(array.size()) +
                            " sensors");
    }
    if (failed_count == 0) return array;
    std::vector<std::size_t> order(array.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<bool> removed(array.size(), false);
    for (std::size_t i = 0; i < failed_count; ++i) removed[order[i]] = true;

    std::vector<Vec3> kept;
    kept.reserve(array.size() - failed_count);
    for (std::size_t i = 0; i < array.size(); ++i) {
        if (!removed[i]) kept.push_back(array.positions()[i]);
    }
    return SensorArray(std::move(kept), array.kind(), array.noise_std());
}

std::vector<ResilienceRow> resilience_study(const ScenarioConfig& cfg,
                                            const std::vector<std::size_t>& failed_counts,
                                            int runs, unsigned threads) {
    if (runs < 1) throw InvalidConfig("experiment.runs: must be at least 1");
    const SensorArray base = build_array(cfg);
    for (std::size_t c : failed_counts) {
        if (c >= base.size()) {
            throw InvalidConfig("experiment.resilience.failed_counts: " + std::to_string(c) +
                                " is not below the array size " + std::to_string(base.size()));
        }
    }
    const std::size_t steps = build_trajectory(cfg).size();
    std::vector<ResilienceRow> rows;
    for (std::size_t count : failed_counts) {
        const auto trials = run_indexed(static_cast<std::size_t>(runs), threads, [&](std::size_t i) {
            RandomStream outage =
                RandomStream::derive(cfg.experiment.master_seed, i, StreamPurpose::kOutage);
            return run_trial(cfg, apply_outage(base, count, outage), i);
        });
        rows.push_back(ResilienceRow{count, aggregate_trials(trials, steps)});
    }
    return rows;
}

std::vector<double> rmse_ratio(const Aggregate& scalar, const Aggregate& vector) {
    if (scalar.rmse.size() != vector.rmse.size()) {
        throw DimensionMismatch("rmse_ratio: aggregates cover different step counts");
    }
    std::vector<double> out(scalar.rmse.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double s = scalar.rmse[k];
        const double v = vector.rmse[k];
        if (std::isfinite(s) && std::isfinite(v) && v > 0.0) out[k] = s / v;
    }
    return out;
}

}  // namespace magnet
