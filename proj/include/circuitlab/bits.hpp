#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "circuitlab/errors.hpp"
#include "circuitlab/rng.hpp"

namespace circuitlab {

// Dynamic bit vector backed by 64-bit words. Bit 0 is the least significant
// bit of word 0 everywhere in this library.
class bitstring {
public:
    bitstring() = default;
    explicit bitstring(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static bitstring from_uint(std::size_t n, std::uint64_t value) {
        if (n > 64) throw structural_error("from_uint: length > 64");
        bitstring b(n);
        if (n > 0) b.words_[0] = (n == 64) ? value : (value & ((1ull << n) - 1));
        return b;
    }

    static bitstring random(std::size_t n, rng& r) {
        bitstring b(n);
        for (auto& w : b.words_) w = r.next_u64();
        b.mask_tail();
        return b;
    }

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

    void set(std::size_t i, bool v) {
        const std::uint64_t m = 1ull << (i % 64);
        if (v)
            words_[i / 64] |= m;
        else
            words_[i / 64] &= ~m;
    }

    std::uint64_t to_uint() const {
        if (n_ > 64) throw structural_error("to_uint: length > 64");
        return n_ == 0 ? 0 : words_[0];
    }

    std::size_t count_ones() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    // Number of positions where the two strings agree.
    std::size_t count_equal(const bitstring& other) const {
        if (other.n_ != n_) throw structural_error("count_equal: length mismatch");
        std::size_t c = 0;
        for (std::size_t k = 0; k < words_.size(); ++k)
            c += static_cast<std::size_t>(std::popcount(~(words_[k] ^ other.words_[k])));
        // Trim agreement counted in the unused tail bits.
        const std::size_t tail = words_.size() * 64 - n_;
        return c - tail;
    }

    bool operator==(const bitstring& other) const {
        return n_ == other.n_ && words_ == other.words_;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    void mask_tail() {
        if (n_ % 64 != 0 && !words_.empty())
            words_.back() &= (1ull << (n_ % 64)) - 1;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace circuitlab
