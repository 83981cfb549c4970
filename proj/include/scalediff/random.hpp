#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scalediff {

// One independent stream per (seed, stream id); draws never depend on
// which worker owns the stream.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        double u;
        do {
            u = std::generate_canonical<double, 53>(engine_);
        } while (u <= 0.0 || u >= 1.0);
        return u;
    }

    double normal() { return normal_(engine_); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace scalediff
