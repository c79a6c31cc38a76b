#include <cmath>

#include "circuitlab/game.hpp"
#include "doctest.h"

using namespace circuitlab;

namespace {

game_matrix from_rows(const std::vector<std::vector<double>>& rows) {
    game_matrix m;
    for (std::size_t i = 0; i < rows.size(); ++i)
        m.row_labels.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < rows[0].size(); ++j)
        m.col_labels.push_back("c" + std::to_string(j));
    for (const auto& row : rows)
        m.entries.insert(m.entries.end(), row.begin(), row.end());
    return m;
}

game_matrix random_matrix(std::size_t r, std::size_t c, rng& gen) {
    std::vector<std::vector<double>> rows(r, std::vector<double>(c));
    for (auto& row : rows)
        for (auto& e : row) e = gen.next_double();
    return from_rows(rows);
}

}  // namespace

TEST_CASE("exact solver: matching pennies") {
    const auto gv = solve_game_exact(from_rows({{1, 0}, {0, 1}}));
    CHECK(gv.v == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(gv.min_strategy.weights[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(gv.max_strategy.weights[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exact solver: constant matrix") {
    const auto gv = solve_game_exact(from_rows({{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}}));
    CHECK(gv.v == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("exact solver certificates are optimal within 1e-9") {
    rng r(101);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t rows = 1 + r.next_below(8);
        const std::size_t cols = 1 + r.next_below(8);
        const game_matrix m = random_matrix(rows, cols, r);
        const auto gv = solve_game_exact(m);
        CHECK(gv.min_certificate_worst(m) <= gv.v + 1e-9);
        CHECK(gv.max_certificate_worst(m) >= gv.v - 1e-9);
        gv.min_strategy.check();
        gv.max_strategy.check();
    }
}

TEST_CASE("scaling the matrix scales the value and keeps supports") {
    rng r(7);
    for (int trial = 0; trial < 10; ++trial) {
        const game_matrix m = random_matrix(4, 5, r);
        const auto base = solve_game_exact(m);
        for (double lambda : {0.5, 2.0}) {
            game_matrix scaled = m;
            for (auto& e : scaled.entries) e *= lambda;
            const auto gv = solve_game_exact(scaled);
            CHECK(gv.v == doctest::Approx(lambda * base.v).epsilon(1e-7));
            for (std::size_t i = 0; i < m.rows(); ++i)
                CHECK((gv.min_strategy.weights[i] > 1e-7) ==
                      (base.min_strategy.weights[i] > 1e-7));
            for (std::size_t j = 0; j < m.cols(); ++j)
                CHECK((gv.max_strategy.weights[j] > 1e-7) ==
                      (base.max_strategy.weights[j] > 1e-7));
        }
    }
}

TEST_CASE("non-finite entries are rejected") {
    game_matrix m = from_rows({{1.0, 0.0}, {0.0, 1.0}});
    m.entries[2] = std::nan("");
    CHECK_THROWS_AS(solve_game_exact(m), structural_error);
}

TEST_CASE("mw approximates the exact value within epsilon") {
    rng r(202);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t rows = 2 + r.next_below(15);
        const std::size_t cols = 2 + r.next_below(15);
        const game_matrix m = random_matrix(rows, cols, r);
        const auto exact = solve_game_exact(m);
        const auto mw = solve_game_mw(m, 0.05);
        CHECK(std::abs(mw.v - exact.v) <= 0.05);
        CHECK(mw.iterations > 0);
        CHECK(mw.eta > 0.0);
    }
}

TEST_CASE("sparsify: matching pennies at eps=0.1 needs k=35") {
    const game_matrix m = from_rows({{1, 0}, {0, 1}});
    CHECK(k_uniform_count(2, 0.1) == 35);
    const auto gv = solve_game_exact(m);
    const auto sparse = k_uniform_sparsify(m, gv.min_strategy, 0.1, 404);
    REQUIRE(sparse.multiset.has_value());
    CHECK(sparse.multiset->size() == 35);
    sparse.check();
    for (std::size_t j = 0; j < 2; ++j) {
        const double pay = payoff_vs_col(m, sparse.weights, j);
        CHECK(pay >= 0.4 - 1e-12);
        CHECK(pay <= 0.6 + 1e-12);
    }
}

TEST_CASE("sparsify: one-column game needs a single sample") {
    const game_matrix m = from_rows({{0.2}, {0.7}, {0.4}});
    const auto gv = solve_game_exact(m);
    const auto sparse = k_uniform_sparsify(m, gv.min_strategy, 0.3, 1);
    CHECK(sparse.multiset->size() == 1);
    CHECK(payoff_vs_col(m, sparse.weights, 0) == doctest::Approx(0.2));
}

TEST_CASE("sparsify: an already k-uniform optimal strategy passes the scan") {
    const game_matrix m = from_rows({{1, 0}, {0, 1}});
    auto uniform = mixed_strategy::k_uniform(mixed_strategy::side_t::min_rows, {0, 1}, 2);
    const auto sparse = k_uniform_sparsify(m, uniform, 0.5, 11);
    sparse.check();
}

TEST_CASE("sparsify reports the worst opponent after exhausting retries") {
    const game_matrix m = from_rows({{1, 0}, {0, 1}});
    // A deliberately bad strategy: all mass on row 0.
    mixed_strategy bad{mixed_strategy::side_t::min_rows, {1.0, 0.0}, std::nullopt};
    CHECK_THROWS_AS(k_uniform_sparsify(m, bad, 0.1, 3, 4), sparsification_error);
}

TEST_CASE("build_game: dichotomy entries from exact advantages") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const circuit orc = single_gate(2, gate_op::OR, wire::input(0), wire::input(1));
    // D = [label of the single block is 1].
    const circuit label_is_one = projection(3, 2);
    const auto m = build_game({andc, orc}, {label_is_one}, 1, estimate_mode::exact);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 1);
    CHECK(m.at(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(m.at(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
    for (double e : m.entries) {
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
    }
    const auto single = build_game({andc}, {constant_circuit(3, true)}, 1,
                                   estimate_mode::exact);
    CHECK(single.at(0, 0) == 0.0);
}

TEST_CASE("dichotomy: constant column forces the PRF branch with gap 0") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const circuit orc = single_gate(2, gate_op::OR, wire::input(0), wire::input(1));
    dichotomy_options opts;
    opts.blocks = 1;
    opts.safety = 2;
    const auto res = dichotomy({andc, orc}, {constant_circuit(3, false)}, opts, 5);
    CHECK(res.branch == dichotomy_branch::prf);
    CHECK(res.v == doctest::Approx(0.0));
    CHECK(res.certificate_bound <= 1e-12);
    REQUIRE(res.prf.has_value());
    CHECK(res.verdict_line.find("BRANCH=PRF") == 0);
}

TEST_CASE("dichotomy: a perfect tester forces the learner branch") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const circuit tester = any_block_disagreement_tester(andc, 1);
    dichotomy_options opts;
    opts.blocks = 1;
    opts.safety = 2;
    const auto res =
        dichotomy({andc}, {tester, constant_circuit(3, false)}, opts, 6);
    CHECK(res.branch == dichotomy_branch::learner);
    CHECK(res.v >= 0.5 - 1e-12);  // one-row game: value is the best column entry
    CHECK(res.certificate_bound >= 1.0 / 16.0);
    CHECK(res.verdict_line.find("BRANCH=LEARNER") == 0);
}

TEST_CASE("dichotomy learner branch wraps into a working predictor") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    const circuit tester = any_block_disagreement_tester(andc, 1);
    dichotomy_options opts;
    opts.blocks = 1;
    opts.safety = 2;
    const auto res =
        dichotomy({andc}, {tester, constant_circuit(3, false)}, opts, 6);
    REQUIRE(res.branch == dichotomy_branch::learner);
    oracle target = oracle::from_circuit(andc);
    double best = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const predictor p = dichotomy_learner(res, target, seed);
        std::size_t hits = 0;
        for (std::uint64_t x = 0; x < 4; ++x)
            if (p.predict(x) == eval(andc, x)) ++hits;
        best = std::max(best, hits / 4.0);
    }
    // The sampled distinguisher multiset is dominated by the perfect tester,
    // and the hybrid rule inverts it into an exact predictor.
    CHECK(best == 1.0);
    CHECK_THROWS_AS(
        dichotomy_learner(dichotomy({andc}, {constant_circuit(3, false)}, opts, 1),
                          target, 1),
        parameter_error);
}

TEST_CASE("anticheckers: XOR at t=0 yields the half-error floor") {
    const circuit xorc = single_gate(2, gate_op::XOR, wire::input(0), wire::input(1));
    const truth_table h = to_truth_table(xorc);
    const auto res = find_anticheckers(h, 0, 600, 31);
    CHECK(res.v == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(res.distinct_functions == 4);  // 0, 1, x0, x1
    CHECK(res.multiset.size() == 600);
    CHECK(res.floor >= res.v - res.epsilon - 1e-12);
    // Direct scan: every size-0 circuit errs on >= floor of the multiset.
    circuit_enumerator en(2, 0);
    while (auto c = en.next()) {
        std::size_t errs = 0;
        for (auto x : res.multiset)
            if (eval(*c, x) != h.get(x)) ++errs;
        CHECK(static_cast<double>(errs) / res.multiset.size() >= res.floor - 1e-12);
    }
}

TEST_CASE("anticheckers: computable H is a degenerate game") {
    const circuit andc = single_gate(2, gate_op::AND, wire::input(0), wire::input(1));
    CHECK_THROWS_AS(find_anticheckers(to_truth_table(andc), 1, 100, 1),
                    degenerate_game_error);
}
