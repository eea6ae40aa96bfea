// Copyright 2026 The qler Authors
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
#include <cstdint>

namespace qler {

/// Philox4x64 counter-based generator, 10 rounds, with the same round
/// constants and key schedule as the Random123 reference implementation (and
/// NumPy's `Philox` bit generator, which this is tested against).
struct Philox4x64 {
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;
    static constexpr int kRounds = 10;

    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static void mul_hi_lo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(product >> 64);
        lo = static_cast<std::uint64_t>(product);
    }

    /// One keyed permutation of the 256-bit counter block.
    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < kRounds; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            std::uint64_t hi0, lo0, hi1, lo1;
            mul_hi_lo(kMul0, ctr[0], hi0, lo0);
            mul_hi_lo(kMul1, ctr[2], hi1, lo1);
            ctr = Counter{hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// Stream purposes baked into the RNG key so that distinct consumers can never
/// collide even when given the same user seed.
enum class RngDomain : std::uint64_t {
    Generic = 0,
    Subspace = 1,
    Baseline = 2,
};

/// Counter-based per-shot random stream.
///
/// Every (seed, domain, stream, shot) tuple addresses an independent stream:
/// the key carries (seed, domain) and the counter carries (block, shot,
/// stream, format tag). Shots can therefore be generated in any order and
/// split across threads without coordination, and results depend only on the
/// tuple, never on scheduling.
class ShotRng {
  public:
    ShotRng(std::uint64_t seed, RngDomain domain, std::uint64_t stream, std::uint64_t shot)
        : key_{seed, static_cast<std::uint64_t>(domain)},
          base_{0, shot, stream, kFormatTag} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            Philox4x64::Counter ctr = base_;
            ctr[0] = block_index_++;
            buffer_ = Philox4x64::block(ctr, key_);
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (Lemire's method with rejection).
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        std::uint64_t low = static_cast<std::uint64_t>(m);
        if (low < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

  private:
    static constexpr std::uint64_t kFormatTag = 0x716c657200000001ull;  // "qler", stream format 1

    Philox4x64::Key key_;
    Philox4x64::Counter base_;
    Philox4x64::Counter buffer_{};
    std::uint64_t block_index_ = 0;
    int pos_ = 4;
};

}  // namespace qler
