#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "circuitlab/circuit.hpp"
#include "circuitlab/errors.hpp"
#include "circuitlab/rng.hpp"

namespace circuitlab {

constexpr std::uint64_t default_enumeration_budget = 100'000'000ull;

// Wire ordinal for the canonical order: c0 < c1 < x0 < ... < x_{n-1} < g0 < ...
inline std::uint32_t wire_ordinal(const circuit& c, const wire& w) {
    switch (w.k) {
        case wire::kind::constant: return w.index;
        case wire::kind::input: return 2 + w.index;
        case wire::kind::gate: return 2 + c.n + w.index;
    }
    return 0;
}

inline wire wire_from_ordinal(std::uint32_t n, std::uint32_t ord) {
    if (ord < 2) return wire::constant(ord != 0);
    if (ord < 2 + n) return wire::input(ord - 2);
    return wire::gate(ord - 2 - n);
}

// Number of syntactic circuits with exactly s gates.
inline std::uint64_t count_circuits_exact(std::uint32_t n, std::uint32_t s) {
    if (s == 0) return n + 2;
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < s; ++i) {
        const std::uint64_t wires = 2 + n + i;
        total *= 16ull * wires * wires;
    }
    return total;
}

inline std::uint64_t count_circuits_up_to(std::uint32_t n, std::uint32_t s) {
    std::uint64_t total = 0;
    for (std::uint32_t k = 0; k <= s; ++k) total += count_circuits_exact(n, k);
    return total;
}

// Streams every circuit with n inputs and at most max_size gates exactly once,
// in a fixed canonical order: sizes ascending; size 0 yields the constants and
// input projections; for size k the tuple (op_0, a_0, b_0, ..., op_{k-1},
// a_{k-1}, b_{k-1}) counts up lexicographically with the rightmost digit
// fastest, ops before wire ordinals. Single-consumer.
class circuit_enumerator {
public:
    circuit_enumerator(std::uint32_t n, std::uint32_t max_size,
                       std::uint64_t budget = default_enumeration_budget)
        : n_(n), max_size_(max_size), budget_(budget) {
        if (n < 1) throw structural_error("enumerator: n must be >= 1");
    }

    std::uint64_t emitted() const { return emitted_; }

    std::optional<circuit> next() {
        while (size_ <= max_size_) {
            if (size_ == 0) {
                if (trivial_index_ < n_ + 2) {
                    circuit c;
                    c.n = n_;
                    c.output = wire_from_ordinal(n_, trivial_index_);
                    ++trivial_index_;
                    return emit(std::move(c));
                }
                advance_size();
                continue;
            }
            if (!digits_valid_) {
                digits_.assign(3 * size_, 0);
                digits_valid_ = true;
                return emit(build());
            }
            if (increment()) return emit(build());
            advance_size();
        }
        return std::nullopt;
    }

private:
    circuit build() const {
        circuit c;
        c.n = n_;
        c.gates.reserve(size_);
        for (std::uint32_t i = 0; i < size_; ++i) {
            gate g;
            g.op = static_cast<gate_op>(digits_[3 * i]);
            g.a = wire_from_ordinal(n_, digits_[3 * i + 1]);
            g.b = wire_from_ordinal(n_, digits_[3 * i + 2]);
            c.gates.push_back(g);
        }
        c.output = wire::gate(size_ - 1);
        return c;
    }

    std::uint32_t digit_radix(std::uint32_t pos) const {
        return pos % 3 == 0 ? 16 : 2 + n_ + pos / 3;
    }

    bool increment() {
        for (std::uint32_t pos = 3 * size_; pos-- > 0;) {
            if (++digits_[pos] < digit_radix(pos)) return true;
            digits_[pos] = 0;
        }
        return false;
    }

    void advance_size() {
        ++size_;
        digits_valid_ = false;
    }

    std::optional<circuit> emit(circuit&& c) {
        if (emitted_ >= budget_)
            throw budget_error("circuit enumeration budget exceeded at " +
                               std::to_string(emitted_) + " circuits");
        ++emitted_;
        return std::move(c);
    }

    std::uint32_t n_;
    std::uint32_t max_size_;
    std::uint64_t budget_;
    std::uint64_t emitted_ = 0;
    std::uint32_t size_ = 0;
    std::uint32_t trivial_index_ = 0;
    std::vector<std::uint32_t> digits_;
    bool digits_valid_ = false;
};

// Convenience: run fn over the whole stream.
template <typename Fn>
void for_each_circuit(std::uint32_t n, std::uint32_t max_size, std::uint64_t budget,
                      Fn&& fn) {
    circuit_enumerator en(n, max_size, budget);
    while (auto c = en.next()) fn(*c);
}

// Uniform syntactic circuit with exactly `size` gates (uniform op and wires
// per gate). The op symmetry makes the output bit at any fixed input exactly
// unbiased over this distribution.
inline circuit random_circuit(std::uint32_t n, std::uint32_t size, rng& r) {
    circuit c;
    c.n = n;
    if (size == 0) {
        c.output = wire_from_ordinal(n, static_cast<std::uint32_t>(r.next_below(n + 2)));
        return c;
    }
    for (std::uint32_t i = 0; i < size; ++i) {
        const std::uint32_t wires = 2 + n + i;
        gate g;
        g.op = static_cast<gate_op>(r.next_below(16));
        g.a = wire_from_ordinal(n, static_cast<std::uint32_t>(r.next_below(wires)));
        g.b = wire_from_ordinal(n, static_cast<std::uint32_t>(r.next_below(wires)));
        c.gates.push_back(g);
    }
    c.output = wire::gate(size - 1);
    return c;
}

}  // namespace circuitlab
