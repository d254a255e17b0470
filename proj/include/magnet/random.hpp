#pragma once

#include <cstdint>
#include <random>

namespace magnet {

/// Independent sub-streams of a trial. Each purpose gets its own engine so
/// that, for example, changing the outage draw never shifts the noise draws.
enum class StreamPurpose : std::uint32_t {
    kMeasurementNoise = 1,
    kInitialization = 2,
    kOutage = 3,
    kTest = 99,
};

/// Deterministic seeded random stream (mt19937_64).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Stream keyed by (master_seed, trial_index, purpose).
    static RandomStream derive(std::uint64_t master_seed, std::uint64_t trial_index,
                               StreamPurpose purpose);

    double normal(double mean = 0.0, double stddev = 1.0);
    double uniform(double lo = 0.0, double hi = 1.0);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> standard_normal_{0.0, 1.0};
};

}  // namespace magnet
