// Copyright 2026 The chiralwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace cqw {

inline constexpr double pi = std::numbers::pi;

/// Thrown when matrix/vector dimensions disagree with the operation.
class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical method fails to converge or degenerates.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reduce an angle to the canonical interval (-pi, pi]. Values already in
/// range pass through unchanged (bit-exact).
inline double wrap_phase(double theta) {
    if (theta > -pi && theta <= pi) return theta;
    double x = std::fmod(theta + pi, 2.0 * pi);
    if (x <= 0.0) x += 2.0 * pi;
    return x - pi;
}

/// Deterministic RNG. Wraps std::mt19937_64 (whose output sequence is
/// specified by the standard) and derives variates without going through
/// std::uniform_*_distribution, so streams are reproducible across
/// standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased uniform integer in [0, bound).
    std::uint64_t integer(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::integer: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return x % bound;
        }
    }

    /// Derive an independent child stream (for per-task seeding).
    std::uint64_t fork_seed() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace cqw
