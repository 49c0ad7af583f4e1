// Copyright 2026 The ire-sim Authors
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

#ifndef IRE_PHILOX_HPP
#define IRE_PHILOX_HPP

#include <array>
#include <cstdint>

namespace ire
{

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
// pure function of (counter, key), so any atom's draws can be regenerated
// from its index alone.
class Philox4x32
{
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter &c, const Key &k)
    {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// Two open-interval uniforms in (0, 1) with 53-bit resolution from one block.
struct UniformPair
{
    double first;
    double second;
};

inline UniformPair uniform_pair(std::uint64_t seed, std::uint64_t index, std::uint32_t stream)
{
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32), stream, 0u};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    constexpr double scale = 0x1.0p-53;
    const std::uint64_t a = ((static_cast<std::uint64_t>(out[0]) << 32) | out[1]) >> 11;
    const std::uint64_t b = ((static_cast<std::uint64_t>(out[2]) << 32) | out[3]) >> 11;
    return {(static_cast<double>(a) + 0.5) * scale, (static_cast<double>(b) + 0.5) * scale};
}

} // namespace ire

#endif // IRE_PHILOX_HPP
