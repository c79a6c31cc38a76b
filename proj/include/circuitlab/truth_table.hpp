#pragma once

#include <cstdint>
#include <sstream>
#include <string>

#include "circuitlab/bits.hpp"
#include "circuitlab/errors.hpp"

namespace circuitlab {

// Boolean function on n inputs stored as a 2^n-bit vector. The entry at
// index x is f(x) where x is read as an unsigned integer with input variable
// 0 as its least significant bit.
class truth_table {
public:
    truth_table() = default;

    explicit truth_table(unsigned n) : n_(n), bits_(std::size_t(1) << n) {
        if (n < 1 || n > 26) throw structural_error("truth_table: n out of range");
    }

    truth_table(unsigned n, bitstring bits) : n_(n), bits_(std::move(bits)) {
        if (n < 1 || n > 26) throw structural_error("truth_table: n out of range");
        if (bits_.size() != (std::size_t(1) << n))
            throw structural_error("truth_table: bit count != 2^n");
    }

    static truth_table random(unsigned n, rng& r) {
        return truth_table(n, bitstring::random(std::size_t(1) << n, r));
    }

    static truth_table constant(unsigned n, bool v) {
        truth_table t(n);
        if (v)
            for (std::uint64_t x = 0; x < t.num_points(); ++x) t.set(x, true);
        return t;
    }

    unsigned inputs() const { return n_; }
    std::uint64_t num_points() const { return std::uint64_t(1) << n_; }

    bool get(std::uint64_t x) const { return bits_.get(x); }
    void set(std::uint64_t x, bool v) { bits_.set(x, v); }

    std::size_t count_ones() const { return bits_.count_ones(); }
    std::size_t agreement(const truth_table& other) const {
        return bits_.count_equal(other.bits_);
    }

    const bitstring& bits() const { return bits_; }

    bool operator==(const truth_table& other) const {
        return n_ == other.n_ && bits_ == other.bits_;
    }

    // File format: header "n=<n>", then one line with a hex string of the
    // 2^n bits, LSB first (nibble i holds bits 4i..4i+3).
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        const std::size_t nibbles = (num_points() + 3) / 4;
        std::string s;
        s.reserve(nibbles);
        for (std::size_t k = 0; k < nibbles; ++k) {
            unsigned v = 0;
            for (unsigned j = 0; j < 4; ++j) {
                const std::size_t i = 4 * k + j;
                if (i < num_points() && bits_.get(i)) v |= 1u << j;
            }
            s += digits[v];
        }
        return s;
    }

    std::string to_file() const {
        return "n=" + std::to_string(n_) + "\n" + to_hex() + "\n";
    }

    static truth_table from_file(const std::string& text) {
        std::istringstream in(text);
        std::string header, hex;
        if (!std::getline(in, header) || header.rfind("n=", 0) != 0)
            throw structural_error("truth_table file: missing n= header");
        const unsigned n = static_cast<unsigned>(std::stoul(header.substr(2)));
        if (!(in >> hex)) throw structural_error("truth_table file: missing hex body");
        truth_table t(n);
        const std::size_t nibbles = (t.num_points() + 3) / 4;
        if (hex.size() != nibbles)
            throw structural_error("truth_table file: wrong hex length");
        for (std::size_t k = 0; k < nibbles; ++k) {
            const char c = hex[k];
            unsigned v;
            if (c >= '0' && c <= '9')
                v = static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f')
                v = static_cast<unsigned>(c - 'a') + 10;
            else if (c >= 'A' && c <= 'F')
                v = static_cast<unsigned>(c - 'A') + 10;
            else
                throw structural_error("truth_table file: bad hex digit");
            for (unsigned j = 0; j < 4; ++j) {
                const std::size_t i = 4 * k + j;
                if (i < t.num_points()) t.set(i, (v >> j) & 1);
            }
        }
        return t;
    }

private:
    unsigned n_ = 0;
    bitstring bits_;
};

}  // namespace circuitlab
