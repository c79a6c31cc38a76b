#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "circuitlab/enumerate.hpp"
#include "circuitlab/errors.hpp"
#include "circuitlab/rng.hpp"
#include "circuitlab/truth_table.hpp"

namespace circuitlab {

// Ordered list of labeled sample points (y_i, b_i); the y_i must be distinct.
class sample_list {
public:
    sample_list(std::uint32_t n, std::vector<std::pair<std::uint64_t, bool>> samples)
        : n_(n), samples_(std::move(samples)) {
        if (n_ < 1) throw structural_error("sample_list: n must be >= 1");
        if (samples_.empty()) throw structural_error("sample_list: empty");
        auto sorted = samples_;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (sorted[i].first == sorted[i + 1].first)
                throw structural_error("sample_list: duplicate sample point");
        for (const auto& [y, b] : samples_)
            if (n_ < 64 && (y >> n_) != 0)
                throw structural_error("sample_list: point out of range");
    }

    static sample_list full_table(const truth_table& t) {
        std::vector<std::pair<std::uint64_t, bool>> s;
        s.reserve(t.num_points());
        for (std::uint64_t x = 0; x < t.num_points(); ++x) s.emplace_back(x, t.get(x));
        return sample_list(t.inputs(), std::move(s));
    }

    std::uint32_t inputs() const { return n_; }
    const std::vector<std::pair<std::uint64_t, bool>>& samples() const { return samples_; }

    bool consistent_with(const circuit& c) const {
        for (const auto& [y, b] : samples_)
            if (eval(c, y) != b) return false;
        return true;
    }

private:
    std::uint32_t n_;
    std::vector<std::pair<std::uint64_t, bool>> samples_;
};

struct gcsp_result {
    bool satisfiable;
    std::optional<circuit> witness;  // first consistent circuit in canonical order
};

// GCSP: does some circuit of size <= max_size compute the partial function
// given by the samples? Throws budget_error if the enumeration cap is hit
// before the answer is known.
inline gcsp_result gcsp(const sample_list& samples, std::uint32_t max_size,
                        std::uint64_t budget = default_enumeration_budget) {
    circuit_enumerator en(samples.inputs(), max_size, budget);
    while (auto c = en.next()) {
        if (samples.consistent_with(*c)) return {true, std::move(*c)};
    }
    return {false, std::nullopt};
}

// True iff no circuit of size <= max_size agrees with h on >= gamma * 2^n
// points. Antitone in max_size, monotone in gamma.
inline bool is_hard(const truth_table& h, std::uint32_t max_size, double gamma,
                    std::uint64_t budget = default_enumeration_budget) {
    const double threshold = gamma * static_cast<double>(h.num_points());
    circuit_enumerator en(h.inputs(), max_size, budget);
    while (auto c = en.next()) {
        const auto agree = static_cast<double>(to_truth_table(*c).agreement(h));
        if (agree >= threshold - 1e-9) return false;
    }
    return true;
}

// Rejection-sample a truth table passing is_hard. Deterministic given seed.
inline truth_table sample_hard_function(unsigned n, std::uint32_t max_size,
                                        double gamma, std::uint32_t max_trials,
                                        std::uint64_t seed,
                                        std::uint64_t budget = default_enumeration_budget) {
    rng r(seed);
    for (std::uint32_t trial = 0; trial < max_trials; ++trial) {
        truth_table h = truth_table::random(n, r);
        if (is_hard(h, max_size, gamma, budget)) return h;
    }
    throw not_found_error("no hard function found in " + std::to_string(max_trials) +
                          " trials (size " + std::to_string(max_size) + ", n=" +
                          std::to_string(n) + ")");
}

}  // namespace circuitlab
