#include "magnet/random.hpp"

namespace magnet {

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t trial_index,
                                  StreamPurpose purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial_index & 0xffffffffu),
                      static_cast<std::uint32_t>(trial_index >> 32),
                      static_cast<std::uint32_t>(purpose)};
    RandomStream out(0);
    out.engine_.seed(seq);
    return out;
}

double RandomStream::normal(double mean, double stddev) {
    return mean + stddev * standard_normal_(engine_);
}

double RandomStream::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

}  // namespace magnet
