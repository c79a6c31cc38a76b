#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circuitlab/bits.hpp"
#include "circuitlab/circuit.hpp"
#include "circuitlab/design.hpp"
#include "circuitlab/errors.hpp"
#include "circuitlab/rng.hpp"
#include "circuitlab/stats.hpp"

namespace circuitlab {

// ---------------------------------------------------------------------------
// Block layout. The sample generator G_C maps m n-bit strings x_1..x_m to
// x_1, C(x_1), ..., x_m, C(x_m). In packed form:
//   seed strings:   bit (i*n + j)      = bit j of x_{i+1}
//   output strings: bit (i*(n+1) + j)  = bit j of x_{i+1},
//                   bit (i*(n+1) + n)  = label of block i+1.
// Distinguisher circuits on m(n+1) inputs use the output layout as their
// input variable order.
// ---------------------------------------------------------------------------

struct sample_generator {
    circuit c;
    std::uint32_t blocks;  // m

    std::size_t seed_bits() const { return std::size_t(blocks) * c.n; }
    std::size_t output_bits() const { return std::size_t(blocks) * (c.n + 1); }
};

inline std::uint64_t block_of_seed(const bitstring& x, std::uint32_t n, std::uint32_t i) {
    std::uint64_t v = 0;
    for (std::uint32_t j = 0; j < n; ++j)
        if (x.get(std::size_t(i) * n + j)) v |= 1ull << j;
    return v;
}

inline bitstring g_c_output(const sample_generator& g, const bitstring& x) {
    if (x.size() != g.seed_bits())
        throw structural_error("g_c_output: seed length != m*n");
    const std::uint32_t n = g.c.n;
    bitstring out(g.output_bits());
    for (std::uint32_t i = 0; i < g.blocks; ++i) {
        const std::uint64_t xi = block_of_seed(x, n, i);
        for (std::uint32_t j = 0; j < n; ++j)
            out.set(std::size_t(i) * (n + 1) + j, (xi >> j) & 1);
        out.set(std::size_t(i) * (n + 1) + n, eval(g.c, xi));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nisan-Wigderson generator: one output bit per design row,
// (NW_C(w))_x = C(w restricted to row x).
// ---------------------------------------------------------------------------

struct nw_generator {
    circuit c;        // base circuit, c.n == a.set_size
    design_matrix a;

    void check() const {
        if (c.n != a.set_size)
            throw structural_error("nw_generator: circuit arity != design set size");
    }
};

inline bool nw_row(const nw_generator& gen, const bitstring& w, std::uint64_t row) {
    if (w.size() != gen.a.universe)
        throw structural_error("nw_row: seed length != design universe");
    return eval(gen.c, restrict_bits(w, gen.a.rows[row]).to_uint());
}

// The row function of a fixed seed, as a truth table on log_rows inputs.
// This is exactly the "random circuit" distribution the witnessing protocol
// is run against.
inline truth_table nw_row_function(const nw_generator& gen, const bitstring& w) {
    truth_table t(gen.a.log_rows);
    for (std::uint64_t x = 0; x < gen.a.num_rows(); ++x) t.set(x, nw_row(gen, w, x));
    return t;
}

// ---------------------------------------------------------------------------
// Distinguishers. Game columns are plain circuits; pipeline distinguishers
// (e.g. the GCSP decider) are arbitrary predicates on packed outputs, so both
// shapes live behind one wrapper. When a circuit is present the exact paths
// use its truth table.
// ---------------------------------------------------------------------------

struct distinguisher {
    std::size_t input_bits;
    std::function<bool(const bitstring&)> f;
    std::optional<circuit> circ;
    std::string name;

    static distinguisher from_circuit(circuit c, std::string name = "") {
        distinguisher d;
        d.input_bits = std::size_t(c.n);
        d.circ = c;
        d.name = name.empty() ? label(c) : std::move(name);
        d.f = [c = std::move(c)](const bitstring& z) { return eval(c, z.to_uint()); };
        return d;
    }

    bool operator()(const bitstring& z) const {
        if (z.size() != input_bits)
            throw structural_error("distinguisher: arity mismatch");
        return f(z);
    }
};

// D(z) = [label of block `block` differs from C(x_block)], as a circuit on
// m(n+1) inputs.
inline circuit block_disagreement_tester(const circuit& c, std::uint32_t m,
                                         std::uint32_t block) {
    circuit d;
    d.n = m * (c.n + 1);
    std::vector<wire> ins;
    ins.reserve(c.n);
    for (std::uint32_t j = 0; j < c.n; ++j)
        ins.push_back(wire::input(block * (c.n + 1) + j));
    const wire cx = inline_circuit(d, c, ins);
    d.gates.push_back({gate_op::XOR, cx, wire::input(block * (c.n + 1) + c.n)});
    d.output = wire::gate(static_cast<std::uint32_t>(d.gates.size()) - 1);
    return d;
}

// D(z) = [some block's label differs from C(x_block)]; rejects exactly the
// range of G_C.
inline circuit any_block_disagreement_tester(const circuit& c, std::uint32_t m) {
    circuit d;
    d.n = m * (c.n + 1);
    wire acc = wire::constant(false);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::vector<wire> ins;
        for (std::uint32_t j = 0; j < c.n; ++j)
            ins.push_back(wire::input(i * (c.n + 1) + j));
        const wire cx = inline_circuit(d, c, ins);
        d.gates.push_back({gate_op::XOR, cx, wire::input(i * (c.n + 1) + c.n)});
        const wire diff = wire::gate(static_cast<std::uint32_t>(d.gates.size()) - 1);
        d.gates.push_back({gate_op::OR, acc, diff});
        acc = wire::gate(static_cast<std::uint32_t>(d.gates.size()) - 1);
    }
    d.output = acc;
    return d;
}

// ---------------------------------------------------------------------------
// Succinct non-uniform PRF: a multiset of circuits; its output distribution
// picks a member uniformly (multiplicity-weighted) and a uniform seed, and
// emits G_member(seed).
// ---------------------------------------------------------------------------

struct succinct_prf {
    std::vector<circuit> members;  // multiset, all with the same arity
    std::uint32_t blocks;          // m
    double safety_size;            // s it is meant to be safe against

    void check() const {
        if (members.empty()) throw structural_error("succinct_prf: empty multiset");
        for (const auto& c : members)
            if (c.n != members.front().n)
                throw structural_error("succinct_prf: mixed arities");
    }
};

enum class estimate_mode { exact, monte_carlo };

struct mc_options {
    std::uint64_t samples = 100'000;  // default per-probability sample count
    std::uint64_t seed = 1;
};

struct gap_report {
    double value;
    estimate_mode mode;
    std::uint64_t samples;      // per-side sample count (0 for exact)
    double ci_half_width;       // Hoeffding at 95%, 0 for exact
};

inline double exact_pr_uniform_one(const distinguisher& d,
                                   std::uint64_t budget = 1ull << 28) {
    if (d.circ) {
        return static_cast<double>(to_truth_table(*d.circ).count_ones()) /
               static_cast<double>(std::uint64_t(1) << d.circ->n);
    }
    if (d.input_bits >= 63 || (std::uint64_t(1) << d.input_bits) > budget)
        throw budget_error("exact uniform probability out of reach");
    const std::uint64_t total = std::uint64_t(1) << d.input_bits;
    std::uint64_t ones = 0;
    for (std::uint64_t z = 0; z < total; ++z)
        if (d(bitstring::from_uint(d.input_bits, z))) ++ones;
    return static_cast<double>(ones) / static_cast<double>(total);
}

// Pr_uniform[D=1] - Pr_{member,seed}[D(G(seed))=1].
inline gap_report prf_distinguishing_gap(const succinct_prf& s, const distinguisher& d,
                                         estimate_mode mode, mc_options mc = {},
                                         std::uint64_t budget = 1ull << 28) {
    s.check();
    const std::uint32_t n = s.members.front().n;
    const std::size_t out_bits = std::size_t(s.blocks) * (n + 1);
    if (d.input_bits != out_bits)
        throw structural_error("prf gap: distinguisher arity mismatch");

    if (mode == estimate_mode::exact) {
        const std::uint64_t seed_count = std::uint64_t(1) << (std::size_t(s.blocks) * n);
        if (std::size_t(s.blocks) * n >= 63 ||
            seed_count * s.members.size() > budget)
            throw budget_error("prf gap: exact enumeration out of budget");
        const double p_uniform = exact_pr_uniform_one(d, budget);
        std::uint64_t ones = 0;
        for (const auto& member : s.members) {
            const sample_generator g{member, s.blocks};
            for (std::uint64_t x = 0; x < seed_count; ++x)
                if (d(g_c_output(g, bitstring::from_uint(g.seed_bits(), x)))) ++ones;
        }
        const double p_prf = static_cast<double>(ones) /
                             (static_cast<double>(seed_count) *
                              static_cast<double>(s.members.size()));
        return {p_uniform - p_prf, estimate_mode::exact, 0, 0.0};
    }

    if (mc.samples == 0) throw parameter_error("prf gap: zero monte-carlo samples");
    rng r(mc.seed);
    std::uint64_t hit_uniform = 0, hit_prf = 0;
    for (std::uint64_t t = 0; t < mc.samples; ++t) {
        if (d(bitstring::random(out_bits, r))) ++hit_uniform;
        const auto& member = s.members[r.next_below(s.members.size())];
        const sample_generator g{member, s.blocks};
        if (d(g_c_output(g, bitstring::random(g.seed_bits(), r)))) ++hit_prf;
    }
    const double gap = (static_cast<double>(hit_uniform) - static_cast<double>(hit_prf)) /
                       static_cast<double>(mc.samples);
    return {gap, estimate_mode::monte_carlo, mc.samples,
            2.0 * hoeffding_half_width(mc.samples)};
}

}  // namespace circuitlab
