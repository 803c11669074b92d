/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "btn/errors.hpp"

namespace btn {

/// Dense packed bit sequence. Bit i lives in word i/64, position i%64
/// (LSB-first). Unused tail bits of the last word are kept zero, so
/// word-level equality, popcount and XOR are valid on the whole buffer.
class BitVec {
public:
    BitVec() = default;

    explicit BitVec(std::size_t n, bool fill = false)
        : size_(n), words_((n + 63) / 64, fill ? ~0ull : 0ull) {
        clear_tail();
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ull; }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = 1ull << (i & 63);
        if (v)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= 1ull << (i & 63); }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::size_t hamming(const BitVec& other) const {
        if (size_ != other.size_)
            throw ShapeError("BitVec::hamming: size mismatch (" + std::to_string(size_) +
                             " vs " + std::to_string(other.size_) + ")");
        std::size_t c = 0;
        for (std::size_t k = 0; k < words_.size(); ++k)
            c += static_cast<std::size_t>(std::popcount(words_[k] ^ other.words_[k]));
        return c;
    }

    bool operator==(const BitVec& other) const {
        return size_ == other.size_ && words_ == other.words_;
    }
    bool operator!=(const BitVec& other) const { return !(*this == other); }

    /// First-differing-bit order with 0 < 1; equal prefixes compare by size.
    bool lex_less(const BitVec& other) const {
        const std::size_t n = size_ < other.size_ ? size_ : other.size_;
        for (std::size_t i = 0; i < n; ++i) {
            const bool a = get(i), b = other.get(i);
            if (a != b) return !a;
        }
        return size_ < other.size_;
    }

    /// Copy of bits [0, n).
    BitVec prefix(std::size_t n) const {
        BitVec out(n);
        for (std::size_t i = 0; i < n; ++i) out.set(i, get(i));
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

    /// ORs `len` bits of `src` starting at `src_off` into this, at `dst_off`.
    void or_range(const BitVec& src, std::size_t src_off, std::size_t dst_off,
                  std::size_t len) {
        for (std::size_t i = 0; i < len; ++i)
            if (src.get(src_off + i)) set(dst_off + i, true);
    }

private:
    void clear_tail() {
        if (size_ & 63) words_.back() &= (1ull << (size_ & 63)) - 1;
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace btn
