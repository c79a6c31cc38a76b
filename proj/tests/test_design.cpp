#include "circuitlab/design.hpp"
#include "doctest.h"

using namespace circuitlab;

TEST_CASE("affine rows over GF(3) intersect in at most one cell") {
    const design_matrix d = make_design(3, 3, 1);
    CHECK(d.field_prime == 3);
    CHECK(d.universe == 9);
    // Row 3 has coefficients (0,1): q(x) = x. Row 4 has (1,1): q(x) = x + 1.
    CHECK(d.rows[3] == std::vector<std::uint32_t>{0, 4, 8});
    CHECK(d.rows[4] == std::vector<std::uint32_t>{1, 5, 6});
    CHECK(intersection_size(d.rows[3], d.rows[4]) == 0);
    CHECK(max_pairwise_intersection(d) <= 1);
}

TEST_CASE("degree-0 rows are graphs of distinct constants") {
    const design_matrix d = make_design(1, 3, 0);
    CHECK(d.rows[0] == std::vector<std::uint32_t>{0, 3, 6});
    CHECK(d.rows[1] == std::vector<std::uint32_t>{1, 4, 7});
    CHECK(max_pairwise_intersection(d) == 0);
}

TEST_CASE("pairwise intersections respect the degree bound across a grid") {
    for (const auto& [b, l, deg] : {std::tuple{3u, 3u, 1u}, {4u, 5u, 2u}, {5u, 7u, 2u},
                                    {6u, 8u, 2u}, {4u, 4u, 4u}}) {
        const design_matrix d = make_design(b, l, deg);
        CHECK(d.num_rows() == (1ull << b));
        for (const auto& row : d.rows) {
            CHECK(row.size() == l);
            for (auto idx : row) CHECK(idx < d.universe);
        }
        CHECK(max_pairwise_intersection(d) <= deg);
        CHECK(d.universe <= 2ull * l * l);
    }
}

TEST_CASE("make_design is deterministic and validates parameters") {
    const design_matrix a = make_design(4, 5, 2);
    const design_matrix b = make_design(4, 5, 2);
    CHECK(a.rows == b.rows);
    // p = 2 for l = 2, so one coefficient gives only 2 polynomials < 2^2 rows.
    CHECK_THROWS_AS(make_design(2, 2, 0), parameter_error);
}

TEST_CASE("restrict picks row positions in sorted order") {
    bitstring w(9);
    for (std::size_t i : {1, 2, 4, 7, 8}) w.set(i, true);  // w = 011010011 (LSB first)
    const std::vector<std::uint32_t> j = {0, 4, 7};
    const bitstring u = restrict_bits(w, j);
    REQUIRE(u.size() == 3);
    // Second implementation: direct index check.
    for (std::size_t k = 0; k < j.size(); ++k) CHECK(u.get(k) == w.get(j[k]));
    CHECK_FALSE(u.get(0));
    CHECK(u.get(1));
    CHECK(u.get(2));

    bitstring ones(9);
    for (std::size_t i = 0; i < 9; ++i) ones.set(i, true);
    const bitstring all = restrict_bits(ones, j);
    CHECK(all.count_ones() == 3);

    bitstring indicator(9);
    for (auto i : j) indicator.set(i, true);
    CHECK(restrict_bits(indicator, j).count_ones() == 3);

    CHECK_THROWS_AS(restrict_bits(bitstring(4), j), structural_error);
}

TEST_CASE("assemble and (restrict, complement) are mutually inverse") {
    rng r(17);
    for (const auto& [b, l, deg] : {std::tuple{3u, 3u, 1u}, {4u, 5u, 2u}}) {
        const design_matrix d = make_design(b, l, deg);
        for (int trial = 0; trial < 4; ++trial) {
            const bitstring w = bitstring::random(d.universe, r);
            for (std::uint64_t x = 0; x < d.num_rows(); ++x) {
                const bitstring u = restrict_bits(w, d.rows[x]);
                const bitstring v = complement_bits(w, d, x);
                CHECK(assemble(d, x, u, v) == w);
                CHECK(restrict_bits(assemble(d, x, u, v), d.rows[x]) == u);
            }
        }
        // All-zero case.
        const bitstring zu(d.set_size), zv(d.universe - d.set_size);
        CHECK(assemble(d, 0, zu, zv).count_ones() == 0);
    }
}

TEST_CASE("assemble rejects length mismatches") {
    const design_matrix d = make_design(3, 3, 1);
    CHECK_THROWS_AS(assemble(d, 0, bitstring(2), bitstring(6)), structural_error);
    CHECK_THROWS_AS(assemble(d, 0, bitstring(3), bitstring(5)), structural_error);
}

TEST_CASE("design dump format") {
    const design_matrix d = make_design(1, 3, 0);
    CHECK(dump_design(d) == "1 3 0 3 9\n0 3 6\n1 4 7\n");
}
