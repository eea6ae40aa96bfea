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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qler/error.hpp"

namespace qler {

/// Fixed-length bit vector packed into 64-bit words, little-endian within a
/// word (bit i lives in word i/64 at position i%64). Trailing bits of the last
/// word are kept zero so whole-word operations (XOR, popcount, compare, hash)
/// need no masking.
class BitVec {
  public:
    BitVec() = default;

    explicit BitVec(std::size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {}

    std::size_t size() const { return num_bits_; }
    std::size_t num_words() const { return words_.size(); }
    const std::uint64_t* data() const { return words_.data(); }
    std::uint64_t* data() { return words_.data(); }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(std::size_t i, bool value = true) {
        std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    void xor_with(const BitVec& other) {
        require(other.num_bits_ == num_bits_, ErrorKind::Internal, "bit vector size mismatch in xor");
        for (std::size_t w = 0; w < words_.size(); ++w) {
            words_[w] ^= other.words_[w];
        }
    }

    /// XOR a raw word span of the same length into this vector.
    void xor_words(const std::uint64_t* src) {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            words_[w] ^= src[w];
        }
    }

    std::size_t popcount() const {
        std::size_t total = 0;
        for (std::uint64_t w : words_) {
            total += static_cast<std::size_t>(std::popcount(w));
        }
        return total;
    }

    bool any() const {
        for (std::uint64_t w : words_) {
            if (w != 0) {
                return true;
            }
        }
        return false;
    }

    bool none() const { return !any(); }

    /// Calls fn(index) for every set bit, in increasing index order.
    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w != 0) {
                int bit = std::countr_zero(w);
                fn(wi * 64 + static_cast<std::size_t>(bit));
                w &= w - 1;
            }
        }
    }

    std::vector<std::size_t> set_bits() const {
        std::vector<std::size_t> out;
        for_each_set([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.num_bits_ == b.num_bits_ && a.words_ == b.words_;
    }
    friend bool operator!=(const BitVec& a, const BitVec& b) { return !(a == b); }

    /// Deterministic lexicographic comparison (word 0 most significant for
    /// ordering purposes). Used for reproducible tie-breaking.
    friend bool operator<(const BitVec& a, const BitVec& b) {
        if (a.num_bits_ != b.num_bits_) {
            return a.num_bits_ < b.num_bits_;
        }
        return a.words_ < b.words_;
    }

    std::uint64_t hash() const {
        // FNV-1a over the packed words plus the length.
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 0x100000001b3ull;
            }
        };
        mix(static_cast<std::uint64_t>(num_bits_));
        for (std::uint64_t w : words_) {
            mix(w);
        }
        return h;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(num_bits_);
        for (std::size_t i = 0; i < num_bits_; ++i) {
            s.push_back(get(i) ? '1' : '0');
        }
        return s;
    }

  private:
    std::size_t num_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitVecHash {
    std::size_t operator()(const BitVec& v) const { return static_cast<std::size_t>(v.hash()); }
};

}  // namespace qler
