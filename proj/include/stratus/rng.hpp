// Copyright 2026 The stratus authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "stratus/types.hpp"

namespace stratus {

/// The single pseudo-random stream behind a run. Every stochastic choice
/// (runtime jitter at load, fault draws during the run) consumes from this
/// stream in a fixed order, which is what makes runs replayable. The raw
/// mt19937_64 output is mapped to ranges here rather than through
/// std::uniform_*_distribution so results do not depend on the standard
/// library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [lo, hi], inclusive. Uses rejection sampling to
    /// stay exactly uniform.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Number of whole periods until the first success of a Bernoulli(p)
    /// trial repeated once per period; support {1, 2, ...}.
    std::int64_t geometric_periods(double p) {
        if (p >= 1.0) return 1;
        if (p <= 0.0) return INT64_MAX / 2;
        const double u = uniform01();
        const double k = std::floor(std::log(1.0 - u) / std::log(1.0 - p));
        if (k >= 9.0e18) return INT64_MAX / 2;
        return static_cast<std::int64_t>(k) + 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace stratus
