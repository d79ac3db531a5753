/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace dwq {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// every draw is a pure function of (key, counter).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Standard normal variates keyed by (seed, trajectory, stream, step).
/// Trajectories of an ensemble, and the two particles of a pair, draw from
/// disjoint counters, so results do not depend on scheduling.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trajectory_(trajectory), stream_(stream)
    {}

    [[nodiscard]] double operator()(std::uint64_t step) const
    {
        const auto w = Philox4x32::generate(
            {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), trajectory_, stream_}, key_);
        const std::uint64_t a = ((static_cast<std::uint64_t>(w[0]) << 32) | w[1]) >> 11;
        const std::uint64_t b = ((static_cast<std::uint64_t>(w[2]) << 32) | w[3]) >> 11;
        constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
        const double u1 = (static_cast<double>(a) + 0.5) * scale;
        const double u2 = static_cast<double>(b) * scale;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    [[nodiscard]] std::uint32_t trajectory() const { return trajectory_; }
    [[nodiscard]] std::uint32_t stream() const { return stream_; }

private:
    Philox4x32::Key key_;
    std::uint32_t trajectory_;
    std::uint32_t stream_;
};

} // namespace dwq
