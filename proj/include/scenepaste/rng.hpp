// Copyright 2026 The scenepaste Authors
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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace scenepaste {

// Output bytes must be reproducible across platforms and worker counts, so
// generators and variate transforms are pinned here instead of relying on
// implementation-defined <random> distributions.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ seeded from a single 64-bit key via splitmix64.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : key_(key) {
        std::uint64_t sm = key;
        for (auto& word : state_)
            word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + next_unit() * (hi - lo);
    }

    // Uniform in [0, n). Consumes exactly one draw; the multiply-shift map
    // carries an O(n / 2^64) bias, negligible at bank/row sizes.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) {
        return next_unit() < p;
    }

    // Box-Muller; always consumes two draws.
    double normal() {
        double u1 = next_unit();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Derives an independent stream from this stream's seed key without
    // consuming state, so sibling streams are order-invariant.
    RandomStream child(std::uint64_t key) const {
        return RandomStream(mix(key_, key));
    }

    std::uint64_t key() const { return key_; }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        return splitmix64_next(s);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t key_ = 0;
};

}  // namespace scenepaste
