#include "circuitlab/enumerate.hpp"
#include "circuitlab/generator.hpp"
#include "doctest.h"

using namespace circuitlab;

namespace {

bitstring bits_from_string(const std::string& s) {
    bitstring b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) b.set(i, s[i] == '1');
    return b;
}

circuit parity_circuit(std::uint32_t n) {
    circuit c;
    c.n = n;
    if (n == 1) return projection(1, 0);
    c.gates.push_back({gate_op::XOR, wire::input(0), wire::input(1)});
    for (std::uint32_t i = 2; i < n; ++i)
        c.gates.push_back({gate_op::XOR, wire::gate(i - 2), wire::input(i)});
    c.output = wire::gate(static_cast<std::uint32_t>(c.gates.size()) - 1);
    return c;
}

}  // namespace

TEST_CASE("g_c_output interleaves blocks with labels") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const sample_generator g{andc, 2};
    CHECK(g_c_output(g, bits_from_string("0111")) == bits_from_string("010111"));

    const sample_generator gz{constant_circuit(2, false), 3};
    rng r(1);
    for (int t = 0; t < 5; ++t) {
        const bitstring out = g_c_output(gz, bitstring::random(6, r));
        for (std::uint32_t i = 0; i < 3; ++i) CHECK_FALSE(out.get(i * 3 + 2));
    }

    CHECK_THROWS_AS(g_c_output(g, bitstring(5)), structural_error);
}

TEST_CASE("g_c_output matches an independent block evaluation") {
    const circuit xorc = single_gate(2, gate_op::XOR, wire::input(0), wire::input(1));
    const sample_generator g{xorc, 3};
    rng r(2);
    for (int t = 0; t < 10; ++t) {
        const bitstring x = bitstring::random(6, r);
        const bitstring out = g_c_output(g, x);
        for (std::uint32_t i = 0; i < 3; ++i) {
            std::uint64_t xi = 0;
            for (std::uint32_t j = 0; j < 2; ++j) {
                CHECK(out.get(i * 3 + j) == x.get(i * 2 + j));  // seed in the clear
                if (x.get(i * 2 + j)) xi |= 1ull << j;
            }
            CHECK(out.get(i * 3 + 2) == eval(xorc, xi));
        }
    }
}

TEST_CASE("nw_row_function: constant base circuit") {
    const design_matrix d = make_design(3, 3, 1);
    const nw_generator gen{constant_circuit(3, true), d};
    rng r(3);
    for (int t = 0; t < 3; ++t) {
        const truth_table row = nw_row_function(gen, bitstring::random(d.universe, r));
        CHECK(row.count_ones() == row.num_points());
    }
}

TEST_CASE("nw_row: parity base on the all-ones seed") {
    const design_matrix d = make_design(3, 3, 1);
    const nw_generator gen{parity_circuit(3), d};
    bitstring w(d.universe);
    for (std::size_t i = 0; i < w.size(); ++i) w.set(i, true);
    for (std::uint64_t x = 0; x < d.num_rows(); ++x)
        CHECK(nw_row(gen, w, x) == (3 % 2 == 1));
}

TEST_CASE("nw definitional identity against a second evaluation path") {
    const design_matrix d = make_design(3, 9, 3);  // l = 9 = 3^2
    rng r(4);
    const circuit c = random_circuit(9, 5, r);
    const nw_generator gen{c, d};
    for (int t = 0; t < 4; ++t) {
        const bitstring w = bitstring::random(d.universe, r);
        const truth_table row = nw_row_function(gen, w);
        for (std::uint64_t x = 0; x < d.num_rows(); ++x) {
            // Second path: gather the restriction bit by bit, then evaluate.
            std::uint64_t u = 0;
            for (std::size_t k = 0; k < d.rows[x].size(); ++k)
                if (w.get(d.rows[x][k])) u |= 1ull << k;
            CHECK(row.get(x) == eval(c, u));
            CHECK(nw_row(gen, w, x) == eval(c, u));
        }
    }
    CHECK_THROWS_AS(nw_row(gen, bitstring(3), 0), structural_error);
}

TEST_CASE("prf gap: constant distinguisher sees nothing") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const succinct_prf s{{andc}, 1, 2.0};
    const auto d = distinguisher::from_circuit(constant_circuit(3, true));
    const auto rep = prf_distinguishing_gap(s, d, estimate_mode::exact);
    CHECK(rep.value == 0.0);
}

TEST_CASE("prf gap: disagreement tester at n=2, m=1 is exactly 1/2") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const succinct_prf s{{andc}, 1, 2.0};
    const auto d =
        distinguisher::from_circuit(block_disagreement_tester(andc, 1, 0));
    const auto rep = prf_distinguishing_gap(s, d, estimate_mode::exact);
    CHECK(rep.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("prf gap: monte carlo tracks exact within 3 hoeffding widths") {
    const circuit xorc = single_gate(2, gate_op::XOR, wire::input(0), wire::input(1));
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const succinct_prf s{{xorc, andc}, 2, 2.0};
    const auto d = distinguisher::from_circuit(
        any_block_disagreement_tester(xorc, 2));
    const auto exact = prf_distinguishing_gap(s, d, estimate_mode::exact);
    const auto mc = prf_distinguishing_gap(s, d, estimate_mode::monte_carlo,
                                           {20'000, 9});
    CHECK(std::abs(mc.value - exact.value) <=
          3.0 * 2.0 * hoeffding_half_width(20'000));
    CHECK_THROWS_AS(
        prf_distinguishing_gap(s, d, estimate_mode::monte_carlo, {0, 1}),
        parameter_error);
}

TEST_CASE("prf gap is exactly 0 for seed-block-only distinguishers with k=1") {
    // D reads only the x-block variables, which are uniform under both
    // distributions.
    const circuit base = single_gate(2, gate_op::OR, wire::input(0), wire::input(1));
    const succinct_prf s{{base}, 2, 2.0};
    circuit d;
    d.n = 6;
    d.gates.push_back({gate_op::XOR, wire::input(0), wire::input(4)});  // x-bits only
    d.output = wire::gate(0);
    const auto rep =
        prf_distinguishing_gap(s, distinguisher::from_circuit(d), estimate_mode::exact);
    CHECK(rep.value == 0.0);
}

TEST_CASE("disagreement testers reject exactly the generator range") {
    rng r(5);
    const circuit c = random_circuit(2, 3, r);
    const std::uint32_t m = 2;
    const auto d = distinguisher::from_circuit(any_block_disagreement_tester(c, m));
    const sample_generator g{c, m};
    for (std::uint64_t x = 0; x < 16; ++x)
        CHECK_FALSE(d(g_c_output(g, bitstring::from_uint(4, x))));
    std::uint64_t rejected = 0;
    for (std::uint64_t z = 0; z < 64; ++z)
        if (d(bitstring::from_uint(6, z))) ++rejected;
    CHECK(rejected == 64 - 16);  // the 16 generator outputs are exactly the accepts
}
