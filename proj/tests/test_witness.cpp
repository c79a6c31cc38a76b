#include <memory>

#include "circuitlab/enumerate.hpp"
#include "circuitlab/reconstruct.hpp"
#include "circuitlab/witness.hpp"
#include "doctest.h"

using namespace circuitlab;

namespace {

truth_table parity3() {
    truth_table t(3);
    for (std::uint64_t x = 0; x < 8; ++x)
        t.set(x, (__builtin_popcountll(x) & 1) != 0);
    return t;
}

// Queries D at fixed probe rows each round, then proposes from a schedule.
class probing_family : public witness_family {
public:
    probing_family(std::vector<std::uint64_t> probes,
                   std::vector<std::uint64_t> schedule, bool propose_probed = false)
        : probes_(std::move(probes)), schedule_(std::move(schedule)),
          propose_probed_(propose_probed) {}

    std::uint32_t width() const override { return 1; }
    std::uint32_t max_rounds() const override {
        return static_cast<std::uint32_t>(schedule_.size());
    }

    std::optional<std::uint64_t> propose(
        std::uint32_t, std::uint32_t round,
        const std::function<bool(std::uint64_t)>& d_query,
        const std::vector<correction>&) override {
        for (auto p : probes_) (void)d_query(p);
        if (propose_probed_) return probes_.front();  // deliberate rule violation
        if (round > schedule_.size()) return std::nullopt;
        return schedule_[round - 1];
    }

private:
    std::vector<std::uint64_t> probes_;
    std::vector<std::uint64_t> schedule_;
    bool propose_probed_;
};

// C = OR(x0, AND(x1, x2), x5) on 9 inputs; Pr[C=1] = 13/16.
circuit biased_base_circuit() {
    circuit c;
    c.n = 9;
    c.gates.push_back({gate_op::AND, wire::input(1), wire::input(2)});
    c.gates.push_back({gate_op::OR, wire::input(0), wire::gate(0)});
    c.gates.push_back({gate_op::OR, wire::gate(1), wire::input(5)});
    c.output = wire::gate(2);
    return c;
}

}  // namespace

TEST_CASE("run_protocol: one-round witness and the correction path") {
    const truth_table h = parity3();
    // D agrees with H at 5, disagrees at 6.
    const auto d = [&h](std::uint64_t x) { return x == 6 ? !h.get(6) : h.get(x); };

    probing_family direct({}, {6});
    const auto r1 = run_protocol(direct, 0, d, h);
    CHECK(r1.tr.terminal);
    CHECK(r1.tr.rounds == std::vector<std::uint64_t>{6});
    CHECK(r1.corrections.empty());

    probing_family corrected({}, {5, 6});
    const auto r2 = run_protocol(corrected, 0, d, h);
    CHECK(r2.tr.terminal);
    CHECK(r2.tr.rounds == std::vector<std::uint64_t>{5, 6});
    REQUIRE(r2.corrections.size() == 1);
    CHECK(r2.corrections[0].x == 5);
    CHECK(r2.corrections[0].d_value == r2.corrections[0].h_value);

    // No witness anywhere: the round budget runs out.
    const auto honest = [&h](std::uint64_t x) { return h.get(x); };
    const auto r3 = run_protocol(corrected, 0, honest, h);
    CHECK_FALSE(r3.tr.terminal);
    CHECK(r3.tr.rounds.size() == 2);

    const std::string log = trace_log(r2, h, d);
    CHECK(log.find("round=1 x=5") != std::string::npos);
    CHECK(log.find("verdict=witness") != std::string::npos);
}

TEST_CASE("run_protocol rejects candidates the branch already queried") {
    const truth_table h = parity3();
    probing_family faulty({3}, {3}, true);
    const auto d = [](std::uint64_t) { return false; };
    CHECK_THROWS_AS(run_protocol(faulty, 0, d, h), protocol_violation);
}

TEST_CASE("learned family proposes unqueried disagreements in order") {
    const truth_table h = parity3();
    // Fixture learner: knows D's table, queries everything except {2, 6}.
    const learner_fn learner = [](const std::function<bool(std::uint64_t)>& q) {
        learn_result lr{truth_table(3), {}};
        for (std::uint64_t x = 0; x < 8; ++x) {
            if (x == 2 || x == 6) continue;
            lr.hypothesis.set(x, q(x));
            lr.queried.push_back(x);
        }
        // Hypothesis happens to equal D at the held-out points too.
        lr.hypothesis.set(2, true);
        lr.hypothesis.set(6, true);
        return lr;
    };
    auto family = witnesses_from_learning(learner, h, 0.25, 1);
    CHECK(family->width() == 1);

    // D = hypothesis; H(2)=1 (agreeing), H(6)=0 (disagreeing): candidate is 6.
    const auto d = [](std::uint64_t x) {
        return x == 2 || x == 6 || (__builtin_popcountll(x) & 1);
    };
    const auto res = run_protocol(*family, 0, d, h);
    CHECK(res.tr.terminal);
    CHECK(res.tr.rounds == std::vector<std::uint64_t>{6});

    // D identical to H everywhere: no unqueried disagreement exists.
    const auto dh = [&h](std::uint64_t x) { return h.get(x); };
    learner_fn exact = [](const std::function<bool(std::uint64_t)>& q) {
        learn_result lr{truth_table(3), {}};
        for (std::uint64_t x = 0; x < 8; ++x) {
            lr.hypothesis.set(x, q(x));
            lr.queried.push_back(x);
        }
        return lr;
    };
    auto family2 = witnesses_from_learning(exact, h, 0.0, 1);
    const auto res2 = run_protocol(*family2, 0, dh, h);
    CHECK(res2.tr.exhausted);
    CHECK_FALSE(res2.tr.terminal);
}

TEST_CASE("witnesses_from_learning checks the hardness precondition") {
    const circuit andc = single_gate(3, gate_op::AND, wire::input(0), wire::input(1));
    const holdout_learner hl = holdout_learner::seeded(3, 1, 4);
    CHECK_THROWS_AS(
        witnesses_from_learning(hl.as_fn(), to_truth_table(andc), 0.125, 1),
        parameter_error);
}

TEST_CASE("holdout learner success rates sit near the counting bound") {
    const std::uint32_t n = 4;
    const truth_table h = sample_hard_function(n, 1, 1.0 - 1.0 / n, 200, 7);
    const holdout_learner hl = holdout_learner::fixed(n, {5}, {!h.get(5)});
    auto family = witnesses_from_learning(hl.as_fn(), h, hl.error_bound(), 1);
    rng r(71);
    std::vector<circuit> ds;
    for (int i = 0; i < 200; ++i) ds.push_back(random_circuit(n, 4, r));
    const auto res = witness_success_rates(*family, as_callables(ds), h);
    CHECK(res.violations == 0);
    const double bound = 1.0 - 2.0 * hl.error_bound() * n;  // = 1/2 here
    CHECK(res.best_rate >= bound - 0.1);
}

TEST_CASE("find_frequent_trace on a deterministic two-round family") {
    const design_matrix a = make_design(3, 9, 3);
    const circuit c = biased_base_circuit();
    const nw_generator gen{c, a};
    truth_table h(3);  // H = 0 at the scheduled rows: witness iff the row bit is 1
    auto family = std::make_shared<fixed_candidate_family>(
        std::vector<std::vector<std::uint64_t>>{{2, 5}});
    trace_thresholds th;
    const auto res = find_frequent_trace(gen, *family, h, 3000, th, 99);
    REQUIRE(res.ok);
    CHECK(res.branch == 0);
    // Pr[witness at round 1] = Pr[C=1] = 13/16 >= 2/3, so the greedy rule
    // stops at length 1 -- matching the exact computation on the reduced
    // space: stop mass 13/16, extension mass 3/16 < (1/3) * 1.
    CHECK(res.trace == std::vector<std::uint64_t>{2});
    CHECK(res.trace_frequency == doctest::Approx(13.0 / 16.0).epsilon(0.05));
    CHECK(res.mass.total() == 3000);
    CHECK(res.a_productivity == doctest::Approx(13.0 / 16.0).epsilon(1e-9));
    CHECK(res.best_rate >= res.required_rate);

    // Raising the frequency floor above the trace frequency trips the error.
    trace_thresholds strict;
    strict.min_frequency = 0.99;
    CHECK_THROWS_AS(find_frequent_trace(gen, *family, h, 500, strict, 99),
                    not_found_error);
}

TEST_CASE("find_frequent_trace reports distribution failure on weak families") {
    const design_matrix a = make_design(3, 9, 3);
    const circuit c = biased_base_circuit();
    const nw_generator gen{c, a};
    truth_table h = truth_table::constant(3, true);  // witness iff C row = 0: rare
    auto family = std::make_shared<fixed_candidate_family>(
        std::vector<std::vector<std::uint64_t>>{{2}});
    const auto res = find_frequent_trace(gen, *family, h, 800, {}, 5);
    CHECK_FALSE(res.ok);
    CHECK(res.best_rate < res.required_rate);
}

TEST_CASE("reconstruction from a matching guess beats 1/2; controls stay at 1/2") {
    const design_matrix a = make_design(3, 9, 3);
    const circuit c = biased_base_circuit();
    const nw_generator gen{c, a};
    truth_table h(3);  // zero at rows 2 and 5
    auto family = std::make_shared<fixed_candidate_family>(
        std::vector<std::vector<std::uint64_t>>{{2, 5}, {5, 2}});
    const auto found = find_frequent_trace(gen, *family, h, 3000, {}, 123);
    REQUIRE(found.ok);
    REQUIRE(found.trace == std::vector<std::uint64_t>{2});

    oracle target = oracle::from_circuit(c);
    const auto sets = std::make_shared<correction_sets>(build_correction_sets(
        a, found.trace.back(), found.off_row, target, h));
    CHECK(sets->query_count > 0);
    // Completeness: every row other than the distinguished one is answerable
    // for every u, with at most deg free bits feeding its table.
    for (std::uint64_t x = 0; x < a.num_rows(); ++x) {
        if (x == sets->distinguished_row) continue;
        CHECK(sets->overlap_u_bits[x].size() <= a.degree_bound);
        CHECK(sets->table[x].size() ==
              std::size_t(1) << sets->overlap_u_bits[x].size());
    }

    // Matching guess: branch and trace from the search, either maj.
    const trace_guess good{found.branch, found.trace, false};
    const predictor p = reconstruct_predictor(family, a, good, sets);
    const auto exact = measure_predictor(
        p, [&c](std::uint64_t u) { return eval(c, u); }, 0, 0);
    CHECK(exact.agreement == doctest::Approx(13.0 / 16.0).epsilon(1e-9));
    const auto sampled = measure_predictor(
        p, [&c](std::uint64_t u) { return eval(c, u); }, 10'000, 17);
    CHECK(sampled.ci95.lo > 0.5);

    // Wrong branch: the family deviates immediately, so the output is maj and
    // the two maj settings average to exactly 1/2.
    double avg = 0;
    for (bool maj : {false, true}) {
        const trace_guess wrong{1u - found.branch, found.trace, maj};
        const predictor q = reconstruct_predictor(family, a, wrong, sets);
        avg += measure_predictor(
                   q, [&c](std::uint64_t u) { return eval(c, u); }, 0, 0)
                   .agreement;
    }
    CHECK(avg / 2.0 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("learning-to-witnessing round trip ends in a reconstructor") {
    // Inner learner holds out row 1 (H(1) = 1) and guesses 0 there, giving a
    // single always-live candidate branch.
    const design_matrix a = make_design(3, 9, 3);
    const truth_table h = parity3();
    circuit c = single_gate(9, gate_op::AND, wire::input(0), wire::input(1));
    const nw_generator gen{c, a};
    const holdout_learner hl = holdout_learner::fixed(3, {1}, {false});
    std::shared_ptr<witness_family> family =
        witnesses_from_learning(hl.as_fn(), h, hl.error_bound(), 1);

    trace_thresholds th;
    th.tolerance = 0.2;  // configured slack; the asymptotic 3/n^3 default is vacuous at n=3
    const auto found = find_frequent_trace(gen, *family, h, 2000, th, 31);
    REQUIRE(found.ok);
    REQUIRE(found.trace == std::vector<std::uint64_t>{1});

    oracle target = oracle::from_circuit(c);
    const auto sets = std::make_shared<correction_sets>(
        build_correction_sets(a, 1, found.off_row, target, h));
    const trace_guess guess{0, found.trace, false};
    const predictor p = reconstruct_predictor(family, a, guess, sets);
    const auto sampled = measure_predictor(
        p, [&c](std::uint64_t u) { return eval(c, u); }, 10'000, 5);
    CHECK(sampled.agreement == doctest::Approx(0.75).epsilon(0.05));
    CHECK(sampled.ci95.lo > 0.5);
}

TEST_CASE("uniform-guess reconstruction learner beats 1/2 after boosting") {
    const design_matrix a = make_design(3, 9, 3);
    const circuit c = biased_base_circuit();
    truth_table h(3);
    std::shared_ptr<witness_family> family =
        std::make_shared<fixed_candidate_family>(
            std::vector<std::vector<std::uint64_t>>{{2, 5}, {5, 2}});
    oracle target = oracle::from_circuit(c);
    reconstruction_learner_options opts;
    opts.guesses = 96;
    const auto res = reconstruction_learner(family, a, h, target, opts, 2027);
    CHECK(res.total_queries > 0);
    const auto meas = measure_predictor(
        res.best, [&c](std::uint64_t u) { return eval(c, u); }, 10'000, 99);
    CHECK(meas.ci95.lo > 0.5);
    CHECK(meas.agreement >= 0.75);  // matched trace or the majority fallback
}

TEST_CASE("speedup: lookup learner on a constant target is exact") {
    const design_matrix a = make_design(4, 4, 4);
    const circuit f = constant_circuit(4, true);
    oracle target = oracle::from_circuit(f);
    speedup_options opts;
    opts.example_count = 1;
    const auto res = speedup_transform(lookup_inner_learner(), a, target, opts, 42);
    CHECK(res.bundle_size <= res.bundle_cap);
    CHECK(res.bundle_cap == 1ull << 4);
    const auto exact = measure_predictor(
        res.d_prime, [&f](std::uint64_t u) { return eval(f, u); }, 0, 0);
    CHECK(exact.agreement == 1.0);
    for (auto y : res.example_rows) CHECK(y != res.challenge_row);
}

TEST_CASE("speedup: coin learner hovers at 1/2") {
    const design_matrix a = make_design(4, 8, 4);
    rng mk(3);
    const circuit f = random_circuit(8, 4, mk);
    oracle target = oracle::from_circuit(f);
    const inner_learner coin =
        [](const std::vector<std::pair<std::uint64_t, bool>>&, std::uint64_t,
           rng& r) { return r.next_bit(); };
    speedup_options opts;
    opts.example_count = 2;
    const auto res = speedup_transform(coin, a, target, opts, 9);
    const auto exact = measure_predictor(
        res.d_prime, [&f](std::uint64_t u) { return eval(f, u); }, 0, 0);
    CHECK(std::abs(exact.agreement - 0.5) <= 0.15);  // 256 points, 3 sigma ~ 0.094
}
