#pragma once

#include <cstdint>
#include <random>

namespace crt {

// Keyed random stream: (seed, stream) selects an independent sequence.
// Distribution helpers are implemented here instead of using <random>
// distributions, whose output is implementation-defined.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool coin() { return (next() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace crt
