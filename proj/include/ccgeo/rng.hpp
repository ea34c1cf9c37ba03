#pragma once

#include <cstdint>
#include <random>

namespace ccgeo {

// Deterministic RNG used across sampling loops; every worker derives its own
// stream from (seed, stream_id) so runs are reproducible regardless of split.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double normal() { return std::normal_distribution<double>()(gen_); }
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

// 4-dimensional Halton sequence, used for quasi-random multistart seeds.
inline double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index + 1; i > 0; i /= base) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
    }
    return r;
}

}  // namespace ccgeo
