#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "circuitlab/bits.hpp"
#include "circuitlab/errors.hpp"

namespace circuitlab {

// Nisan-Wigderson combinatorial design over GF(p). Row i is the graph of the
// i-th polynomial of degree <= degree_bound, evaluated on the points 0..l-1:
//   J_i = { j*p + q_i(j) : j in [0, l) }
// so two distinct rows meet in at most degree_bound cells. Universe cells are
// indexed (point j, value y) -> j*p + y.
struct design_matrix {
    std::uint32_t log_rows;      // b: 2^b rows
    std::uint32_t set_size;      // l: elements per row
    std::uint32_t degree_bound;  // max pairwise intersection
    std::uint32_t field_prime;   // p, smallest prime in [l, 2l]
    std::uint64_t universe;      // m = l * p
    std::vector<std::vector<std::uint32_t>> rows;  // sorted index sets

    std::uint64_t num_rows() const { return std::uint64_t(1) << log_rows; }
};

inline bool is_prime(std::uint32_t v) {
    if (v < 2) return false;
    for (std::uint32_t d = 2; d * d <= v; ++d)
        if (v % d == 0) return false;
    return true;
}

inline std::uint32_t smallest_prime_in(std::uint32_t lo, std::uint32_t hi) {
    for (std::uint32_t p = lo; p <= hi; ++p)
        if (is_prime(p)) return p;
    throw parameter_error("no prime in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
}

inline design_matrix make_design(std::uint32_t log_rows, std::uint32_t set_size,
                                 std::uint32_t degree_bound) {
    if (set_size < 1) throw parameter_error("make_design: set_size must be >= 1");
    if (log_rows < 1 || log_rows > 30)
        throw parameter_error("make_design: log_rows out of range");
    const std::uint32_t p = smallest_prime_in(set_size, 2 * set_size);

    // Need p^(degree_bound+1) >= 2^log_rows distinct polynomials.
    unsigned __int128 polys = 1;
    bool enough = false;
    for (std::uint32_t e = 0; e <= degree_bound && !enough; ++e) {
        polys *= p;
        if (polys >= (unsigned __int128)(1) << log_rows) enough = true;
    }
    if (!enough)
        throw parameter_error("make_design: p^(deg+1) < 2^b, too few polynomials");

    design_matrix d;
    d.log_rows = log_rows;
    d.set_size = set_size;
    d.degree_bound = degree_bound;
    d.field_prime = p;
    d.universe = std::uint64_t(set_size) * p;
    d.rows.reserve(std::size_t(1) << log_rows);

    const std::uint64_t n_rows = std::uint64_t(1) << log_rows;
    std::vector<std::uint32_t> coeff(degree_bound + 1);
    for (std::uint64_t i = 0; i < n_rows; ++i) {
        // Row index in base p gives the coefficients, low digit = constant term.
        std::uint64_t rest = i;
        for (auto& cf : coeff) {
            cf = static_cast<std::uint32_t>(rest % p);
            rest /= p;
        }
        std::vector<std::uint32_t> row;
        row.reserve(set_size);
        for (std::uint32_t j = 0; j < set_size; ++j) {
            // Horner evaluation of q_i(j) mod p.
            std::uint64_t v = 0;
            for (std::size_t k = coeff.size(); k-- > 0;)
                v = (v * j + coeff[k]) % p;
            row.push_back(j * p + static_cast<std::uint32_t>(v));
        }
        d.rows.push_back(std::move(row));  // already sorted: j*p strictly increases
    }
    return d;
}

// w restricted to a row: output bit k is w at the k-th smallest row element.
inline bitstring restrict_bits(const bitstring& w, const std::vector<std::uint32_t>& row) {
    bitstring out(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] >= w.size()) throw structural_error("restrict: index out of range");
        out.set(k, w.get(row[k]));
    }
    return out;
}

// Bits of w outside the row, in increasing index order.
inline bitstring complement_bits(const bitstring& w, const design_matrix& d,
                                 std::uint64_t row_index) {
    const auto& row = d.rows[row_index];
    bitstring out(w.size() - row.size());
    std::size_t k = 0, r = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (r < row.size() && row[r] == i) {
            ++r;
            continue;
        }
        out.set(k++, w.get(i));
    }
    return out;
}

// Inverse of (restrict, complement): u goes into the row positions, v fills
// the rest in increasing index order.
inline bitstring assemble(const design_matrix& d, std::uint64_t row_index,
                          const bitstring& u, const bitstring& v) {
    const auto& row = d.rows[row_index];
    if (u.size() != row.size()) throw structural_error("assemble: |u| != set_size");
    if (v.size() != d.universe - row.size())
        throw structural_error("assemble: |v| != universe - set_size");
    bitstring w(d.universe);
    std::size_t vi = 0, r = 0;
    for (std::size_t i = 0; i < d.universe; ++i) {
        if (r < row.size() && row[r] == i)
            w.set(i, u.get(r++));
        else
            w.set(i, v.get(vi++));
    }
    return w;
}

inline std::size_t intersection_size(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            ++i;
        else if (a[i] > b[j])
            ++j;
        else
            ++count, ++i, ++j;
    }
    return count;
}

// Exhaustive pairwise verification; returns the max intersection seen.
inline std::size_t max_pairwise_intersection(const design_matrix& d) {
    std::size_t worst = 0;
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        for (std::size_t j = i + 1; j < d.rows.size(); ++j)
            worst = std::max(worst, intersection_size(d.rows[i], d.rows[j]));
    return worst;
}

// Dump format: header "b l deg p m", then one row per line of sorted indices.
inline std::string dump_design(const design_matrix& d) {
    std::ostringstream out;
    out << d.log_rows << ' ' << d.set_size << ' ' << d.degree_bound << ' '
        << d.field_prime << ' ' << d.universe << '\n';
    for (const auto& row : d.rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? " " : "") << row[k];
        out << '\n';
    }
    return out.str();
}

}  // namespace circuitlab
