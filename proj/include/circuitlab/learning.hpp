#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "circuitlab/enumerate.hpp"
#include "circuitlab/errors.hpp"
#include "circuitlab/gcsp.hpp"
#include "circuitlab/generator.hpp"
#include "circuitlab/rng.hpp"
#include "circuitlab/stats.hpp"

namespace circuitlab {

// ---------------------------------------------------------------------------
// Oracles and predictors
// ---------------------------------------------------------------------------

struct query_record {
    std::uint64_t x;
    bool answer;
};

// Target-function oracle with a transcript of every query made through it.
class oracle {
public:
    explicit oracle(std::function<bool(std::uint64_t)> f) : f_(std::move(f)) {}

    static oracle from_circuit(const circuit& c) {
        return oracle([c](std::uint64_t x) { return eval(c, x); });
    }

    static oracle from_table(const truth_table& t) {
        return oracle([t](std::uint64_t x) { return t.get(x); });
    }

    bool query(std::uint64_t x) {
        const bool v = f_(x);
        log_.push_back({x, v});
        return v;
    }

    const std::vector<query_record>& log() const { return log_; }
    void clear_log() { log_.clear(); }

private:
    std::function<bool(std::uint64_t)> f_;
    std::vector<query_record> log_;
};

enum class query_mode { random_examples, nonadaptive_membership, adaptive_membership };

inline const char* query_mode_name(query_mode m) {
    switch (m) {
        case query_mode::random_examples: return "random-examples";
        case query_mode::nonadaptive_membership: return "non-adaptive-membership";
        case query_mode::adaptive_membership: return "adaptive-membership";
    }
    return "?";
}

// A randomized procedure from inputs to bits, frozen to a deterministic
// function once its seed and setup-phase oracle transcript are fixed.
struct predictor {
    query_mode mode = query_mode::random_examples;
    std::uint64_t seed = 0;
    std::uint32_t input_bits = 0;
    std::function<bool(std::uint64_t)> predict_fn;
    std::vector<query_record> setup_queries;
    std::optional<circuit> hypothesis;

    bool predict(std::uint64_t x) const { return predict_fn(x); }
};

// Line-based transcript for replay tests: setup queries, then predictions.
inline std::string transcript(const predictor& p,
                              const std::vector<std::uint64_t>& challenges) {
    std::ostringstream out;
    out << "mode=" << query_mode_name(p.mode) << " seed=" << p.seed << "\n";
    for (const auto& q : p.setup_queries)
        out << "query x=" << std::hex << q.x << std::dec << " a=" << q.answer << "\n";
    for (std::uint64_t x : challenges)
        out << "predict x=" << std::hex << x << std::dec << " out=" << p.predict(x)
            << "\n";
    return out.str();
}

struct advantage_report {
    double value;
    estimate_mode mode;
    std::uint64_t samples;
    double ci_half_width;  // 0 in exact mode
};

// ---------------------------------------------------------------------------
// Distinguishing advantage Pr[D(z)=1] - Pr[D(G_C(x))=1]
// ---------------------------------------------------------------------------

inline advantage_report distinguishing_advantage(const distinguisher& d,
                                                 const circuit& c, std::uint32_t blocks,
                                                 estimate_mode mode, mc_options mc = {},
                                                 std::uint64_t budget = 1ull << 28) {
    const sample_generator g{c, blocks};
    if (d.input_bits != g.output_bits())
        throw structural_error("distinguishing_advantage: arity mismatch");

    if (mode == estimate_mode::exact) {
        if (g.seed_bits() >= 63 || (std::uint64_t(1) << g.seed_bits()) > budget)
            throw budget_error("distinguishing_advantage: exact mode out of budget");
        const double p_uniform = exact_pr_uniform_one(d, budget);
        const std::uint64_t seeds = std::uint64_t(1) << g.seed_bits();
        std::uint64_t ones = 0;
        for (std::uint64_t x = 0; x < seeds; ++x)
            if (d(g_c_output(g, bitstring::from_uint(g.seed_bits(), x)))) ++ones;
        const double p_gen = static_cast<double>(ones) / static_cast<double>(seeds);
        return {p_uniform - p_gen, estimate_mode::exact, 0, 0.0};
    }

    if (mc.samples == 0)
        throw parameter_error("distinguishing_advantage: zero monte-carlo samples");
    rng r(mc.seed);
    std::uint64_t hit_uniform = 0, hit_gen = 0;
    for (std::uint64_t t = 0; t < mc.samples; ++t) {
        if (d(bitstring::random(g.output_bits(), r))) ++hit_uniform;
        if (d(g_c_output(g, bitstring::random(g.seed_bits(), r)))) ++hit_gen;
    }
    const double adv =
        (static_cast<double>(hit_uniform) - static_cast<double>(hit_gen)) /
        static_cast<double>(mc.samples);
    return {adv, estimate_mode::monte_carlo, mc.samples,
            2.0 * hoeffding_half_width(mc.samples)};
}

// ---------------------------------------------------------------------------
// The BFKL hybrid predictor. One instance is a single draw of the internal
// randomness (stage i, the labeled prefix, the guess bits); confidence comes
// from running many seeds and boosting.
// ---------------------------------------------------------------------------

struct bfkl_draw {
    std::uint32_t stage;                    // i in [1, m]
    std::vector<std::uint64_t> prefix_x;    // x_1..x_{i-1}
    std::vector<bool> prefix_label;         // C(x_1)..C(x_{i-1})
    std::vector<bool> guess_bits;           // r_i..r_m
    std::vector<std::uint64_t> suffix_x;    // x_{i+1}..x_m
};

inline bitstring bfkl_assemble(const bfkl_draw& d, std::uint32_t n, std::uint32_t m,
                               std::uint64_t challenge) {
    bitstring z(std::size_t(m) * (n + 1));
    auto put_block = [&](std::uint32_t i, std::uint64_t x, bool lab) {
        for (std::uint32_t j = 0; j < n; ++j)
            z.set(std::size_t(i) * (n + 1) + j, (x >> j) & 1);
        z.set(std::size_t(i) * (n + 1) + n, lab);
    };
    for (std::uint32_t i = 0; i + 1 < d.stage; ++i)
        put_block(i, d.prefix_x[i], d.prefix_label[i]);
    put_block(d.stage - 1, challenge, d.guess_bits[0]);
    for (std::uint32_t i = d.stage; i < m; ++i)
        put_block(i, d.suffix_x[i - d.stage], d.guess_bits[i - d.stage + 1]);
    return z;
}

// Draws the internal randomness from `seed`, queries the target for the i-1
// labeled random examples, and freezes a predictor: on challenge x it outputs
// r_i xor D(assembled string).
inline predictor make_bfkl_predictor(const distinguisher& d, std::uint32_t blocks,
                                     std::uint32_t n, oracle& target,
                                     std::uint64_t seed) {
    if (d.input_bits != std::size_t(blocks) * (n + 1))
        throw structural_error("bfkl: distinguisher arity mismatch");
    rng r(seed);
    bfkl_draw draw;
    draw.stage = 1 + static_cast<std::uint32_t>(r.next_below(blocks));
    predictor p;
    p.mode = query_mode::random_examples;
    p.seed = seed;
    p.input_bits = n;
    for (std::uint32_t i = 0; i + 1 < draw.stage; ++i) {
        const std::uint64_t x = r.next_bits(n);
        draw.prefix_x.push_back(x);
        draw.prefix_label.push_back(target.query(x));
    }
    for (std::uint32_t i = draw.stage; i <= blocks; ++i)
        draw.guess_bits.push_back(r.next_bit());
    for (std::uint32_t i = draw.stage; i < blocks; ++i)
        draw.suffix_x.push_back(r.next_bits(n));
    p.setup_queries = target.log();
    p.predict_fn = [d, draw, n, blocks](std::uint64_t challenge) {
        const bool hit = d(bfkl_assemble(draw, n, blocks, challenge));
        return draw.guess_bits[0] ^ hit;
    };
    return p;
}

// Exact analysis of the predictor by full enumeration: hybrid probabilities
// p_1..p_{m+1}, per-stage success rates, and the distribution of
// per-configuration advantages (for confidence statements).
struct bfkl_exact_stats {
    std::vector<double> hybrid;         // p_i = Pr[D=1 on hybrid i], i = 1..m+1
    std::vector<double> stage_correct;  // Pr[prediction correct | stage i]
    double advantage;                   // independently computed overall advantage
    std::vector<std::pair<double, double>> config_advantages;  // (weight, advantage)

    double hybrid_gap(std::uint32_t i) const { return hybrid[i - 1] - hybrid[i]; }

    double gap_sum() const {
        double s = 0;
        for (std::size_t i = 1; i < hybrid.size(); ++i) s += hybrid[i - 1] - hybrid[i];
        return s;
    }

    // Pr over internal randomness that the frozen predictor has per-challenge
    // advantage >= theta.
    double confidence(double theta) const {
        double s = 0;
        for (const auto& [w, adv] : config_advantages)
            if (adv >= theta - 1e-12) s += w;
        return s;
    }
};

inline bfkl_exact_stats bfkl_exact(const distinguisher& d, const circuit& c,
                                   std::uint32_t blocks,
                                   std::uint64_t budget = 1ull << 28) {
    const std::uint32_t n = c.n;
    const std::uint32_t m = blocks;
    if (std::size_t(m) * (n + 1) > 40)
        throw budget_error("bfkl_exact: instance too large");
    bfkl_exact_stats st;

    // Hybrid i: blocks < i carry true labels, blocks >= i carry free bits.
    for (std::uint32_t i = 1; i <= m + 1; ++i) {
        const std::uint32_t free_bits = m - i + 1;
        const std::uint64_t total = std::uint64_t(1) << (std::size_t(m) * n + free_bits);
        if (total > budget) throw budget_error("bfkl_exact: hybrid out of budget");
        std::uint64_t ones = 0;
        for (std::uint64_t v = 0; v < total; ++v) {
            bitstring z(std::size_t(m) * (n + 1));
            std::uint64_t rest = v;
            for (std::uint32_t blk = 0; blk < m; ++blk) {
                const std::uint64_t x = rest & ((1ull << n) - 1);
                rest >>= n;
                for (std::uint32_t j = 0; j < n; ++j)
                    z.set(std::size_t(blk) * (n + 1) + j, (x >> j) & 1);
                z.set(std::size_t(blk) * (n + 1) + n, eval(c, x));
            }
            for (std::uint32_t k = 0; k < free_bits; ++k) {
                z.set(std::size_t(i - 1 + k) * (n + 1) + n, (rest >> k) & 1);
            }
            if (d(z)) ++ones;
        }
        st.hybrid.push_back(static_cast<double>(ones) / static_cast<double>(total));
    }

    // Per-stage success and per-configuration advantage, by direct simulation.
    st.stage_correct.assign(m, 0.0);
    for (std::uint32_t stage = 1; stage <= m; ++stage) {
        const std::uint32_t prefix_bits = (stage - 1) * n;
        const std::uint32_t guess_count = m - stage + 1;
        const std::uint32_t suffix_bits = (m - stage) * n;
        const std::uint64_t configs =
            std::uint64_t(1) << (prefix_bits + guess_count + suffix_bits);
        const double weight =
            1.0 / (static_cast<double>(m) * static_cast<double>(configs));
        double stage_sum = 0;
        for (std::uint64_t v = 0; v < configs; ++v) {
            std::uint64_t rest = v;
            bfkl_draw draw;
            draw.stage = stage;
            for (std::uint32_t i = 0; i + 1 < stage; ++i) {
                const std::uint64_t x = rest & ((1ull << n) - 1);
                rest >>= n;
                draw.prefix_x.push_back(x);
                draw.prefix_label.push_back(eval(c, x));
            }
            for (std::uint32_t i = 0; i < guess_count; ++i) {
                draw.guess_bits.push_back(rest & 1);
                rest >>= 1;
            }
            for (std::uint32_t i = 0; i < suffix_bits / n; ++i) {
                draw.suffix_x.push_back(rest & ((1ull << n) - 1));
                rest >>= n;
            }
            std::uint64_t correct = 0;
            for (std::uint64_t x = 0; x < (1ull << n); ++x) {
                const bool out = draw.guess_bits[0] ^ d(bfkl_assemble(draw, n, m, x));
                if (out == eval(c, x)) ++correct;
            }
            const double adv = static_cast<double>(correct) /
                               static_cast<double>(1ull << n);
            st.config_advantages.emplace_back(weight, adv);
            stage_sum += adv;
        }
        st.stage_correct[stage - 1] = stage_sum / static_cast<double>(configs);
    }

    const auto adv = distinguishing_advantage(d, c, m, estimate_mode::exact, {}, budget);
    st.advantage = adv.value;
    return st;
}

// ---------------------------------------------------------------------------
// Confidence boosting: test every candidate on the same fresh random queries
// and keep the most accurate one. Ties go to the earliest candidate.
// ---------------------------------------------------------------------------

struct boost_report {
    std::size_t winner_index;
    double empirical_agreement;
    double hoeffding_half_width;  // at 95% for the configured test count
    std::uint64_t tests;
};

template <typename Candidate, typename PredictFn>
boost_report boost_select(const std::vector<Candidate>& candidates, PredictFn&& predict,
                          oracle& target, std::uint32_t input_bits,
                          std::uint64_t test_queries, rng& r) {
    if (candidates.empty()) throw parameter_error("boost: empty candidate list");
    if (test_queries == 0) throw parameter_error("boost: test_queries must be >= 1");
    std::vector<std::uint64_t> xs(test_queries);
    std::vector<bool> labels(test_queries);
    for (std::uint64_t t = 0; t < test_queries; ++t) {
        xs[t] = r.next_bits(input_bits);
        labels[t] = target.query(xs[t]);
    }
    std::size_t best = 0;
    std::uint64_t best_hits = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < test_queries; ++t)
            if (predict(candidates[k], xs[t]) == labels[t]) ++hits;
        if (k == 0 || hits > best_hits) {
            best = k;
            best_hits = hits;
        }
    }
    return {best, static_cast<double>(best_hits) / static_cast<double>(test_queries),
            hoeffding_half_width(test_queries), test_queries};
}

struct circuit_boost_result {
    circuit winner;
    boost_report report;
};

inline circuit_boost_result boost(const std::vector<circuit>& candidates, oracle& target,
                                  std::uint64_t test_queries, std::uint64_t seed) {
    if (candidates.empty()) throw parameter_error("boost: empty candidate list");
    rng r(seed);
    const auto rep = boost_select(
        candidates,
        [](const circuit& c, std::uint64_t x) { return eval(c, x); }, target,
        candidates.front().n, test_queries, r);
    return {candidates[rep.winner_index], rep};
}

// ---------------------------------------------------------------------------
// Learning from succinct natural proofs (GCSP in P/poly stands in as the
// assumed decider). The distinguisher accepts exactly the packed sample lists
// admitting no consistent small circuit, so it rejects the whole range of
// G_C whenever C is within the size bound.
// ---------------------------------------------------------------------------

inline distinguisher gcsp_distinguisher(std::uint32_t n, std::uint32_t blocks,
                                        std::uint32_t size_bound,
                                        std::uint64_t budget = default_enumeration_budget) {
    distinguisher d;
    d.input_bits = std::size_t(blocks) * (n + 1);
    d.name = "gcsp-no[" + std::to_string(size_bound) + "]";
    d.f = [n, blocks, size_bound, budget](const bitstring& z) {
        std::map<std::uint64_t, bool> seen;
        for (std::uint32_t i = 0; i < blocks; ++i) {
            std::uint64_t y = 0;
            for (std::uint32_t j = 0; j < n; ++j)
                if (z.get(std::size_t(i) * (n + 1) + j)) y |= 1ull << j;
            const bool b = z.get(std::size_t(i) * (n + 1) + n);
            auto [it, inserted] = seen.emplace(y, b);
            if (!inserted && it->second != b) return true;  // contradictory labels
        }
        std::vector<std::pair<std::uint64_t, bool>> pts(seen.begin(), seen.end());
        return !gcsp(sample_list(n, std::move(pts)), size_bound, budget).satisfiable;
    };
    return d;
}

struct natural_learner_options {
    std::uint64_t uniform_check_samples = 10'000;
    double tolerance = 0.05;         // accept if Pr_uniform >= 1/2 - tolerance
    std::uint32_t s_eff = 2;         // advantage >= 1/2 = 1/s_eff
    std::uint32_t seed_count = 0;    // 0 -> 2 * m^2 * s_eff
    std::uint64_t boost_tests = 2'000;
    std::uint64_t gcsp_budget = default_enumeration_budget;
};

struct natural_learner_result {
    std::uint32_t blocks;             // m = n^d
    double uniform_accept;            // measured Pr_uniform[D=1]
    std::uint64_t generator_rejects;  // G_C outputs scanned, all rejected
    predictor best;
    boost_report boost_stats;
    std::uint32_t seed_count;
};

inline natural_learner_result natural_proof_learner(const circuit& target_circuit,
                                                    std::uint32_t c_exp,
                                                    std::uint32_t d_exp,
                                                    std::uint64_t seed,
                                                    natural_learner_options opts = {}) {
    const std::uint32_t n = target_circuit.n;
    if (d_exp <= c_exp + 1)
        throw parameter_error("natural_proof_learner: requires d > c + 1");
    auto ipow = [](std::uint32_t base, std::uint32_t e) {
        std::uint64_t v = 1;
        while (e--) v *= base;
        return v;
    };
    const std::uint32_t m = static_cast<std::uint32_t>(ipow(n, d_exp));
    const std::uint32_t size_bound = static_cast<std::uint32_t>(ipow(n, c_exp));

    distinguisher d = gcsp_distinguisher(n, m, size_bound, opts.gcsp_budget);
    rng master(seed);

    // Uniform-side acceptance.
    rng ur = master.derive(1);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < opts.uniform_check_samples; ++t)
        if (d(bitstring::random(d.input_bits, ur))) ++hits;
    const double p_uniform =
        static_cast<double>(hits) / static_cast<double>(opts.uniform_check_samples);
    if (p_uniform < 0.5 - opts.tolerance)
        throw pipeline_error("natural_proof_learner: uniform acceptance below threshold",
                             p_uniform);

    // Generator side rejects by construction; spot-check a sample of seeds.
    const sample_generator g{target_circuit, m};
    rng gr = master.derive(2);
    std::uint64_t scanned = 0;
    for (std::uint64_t t = 0; t < 256; ++t) {
        if (d(g_c_output(g, bitstring::random(g.seed_bits(), gr))))
            throw pipeline_error("natural_proof_learner: generator output accepted", 1.0);
        ++scanned;
    }

    const std::uint32_t seeds =
        opts.seed_count ? opts.seed_count
                        : 2 * m * m * opts.s_eff;
    oracle target = oracle::from_circuit(target_circuit);
    std::vector<predictor> candidates;
    candidates.reserve(seeds);
    for (std::uint32_t k = 0; k < seeds; ++k) {
        target.clear_log();
        candidates.push_back(
            make_bfkl_predictor(d, m, n, target, master.derive(100 + k).next_u64()));
    }
    target.clear_log();
    rng br = master.derive(3);
    const auto rep = boost_select(
        candidates, [](const predictor& p, std::uint64_t x) { return p.predict(x); },
        target, n, opts.boost_tests, br);

    natural_learner_result res{m,
                               p_uniform,
                               scanned,
                               candidates[rep.winner_index],
                               rep,
                               seeds};
    return res;
}

// ---------------------------------------------------------------------------
// Instance-specific prediction: the minimal-size consistent circuit as "the
// right" value at a fresh point, when it is unique.
// ---------------------------------------------------------------------------

enum class instance_verdict { zero, one, undetermined, no_circuit };

inline const char* instance_verdict_name(instance_verdict v) {
    switch (v) {
        case instance_verdict::zero: return "0";
        case instance_verdict::one: return "1";
        case instance_verdict::undetermined: return "undetermined";
        case instance_verdict::no_circuit: return "no-circuit";
    }
    return "?";
}

struct instance_predict_result {
    instance_verdict verdict;
    std::optional<std::uint32_t> minimal_size;  // s*, when a circuit exists
    std::optional<circuit> witness;             // first minimal consistent circuit
};

inline instance_predict_result instance_predict(const sample_list& samples,
                                                std::uint32_t max_size, std::uint64_t y,
                                                std::uint64_t budget = default_enumeration_budget) {
    for (const auto& [py, pb] : samples.samples())
        if (py == y) throw structural_error("instance_predict: y is a sample point");

    circuit_enumerator en(samples.inputs(), max_size, budget);
    std::optional<std::uint32_t> found_size;
    bool value_seen[2] = {false, false};
    std::optional<circuit> first_witness;
    while (auto c = en.next()) {
        const auto sz = static_cast<std::uint32_t>(c->size());
        if (found_size && sz > *found_size) break;  // sizes stream in order
        if (!samples.consistent_with(*c)) continue;
        if (!found_size) found_size = sz;
        const bool v = eval(*c, y);
        if (!first_witness) first_witness = *c;
        value_seen[v ? 1 : 0] = true;
        if (value_seen[0] && value_seen[1]) break;
    }
    if (!found_size) return {instance_verdict::no_circuit, std::nullopt, std::nullopt};
    if (value_seen[0] && value_seen[1])
        return {instance_verdict::undetermined, found_size, first_witness};
    return {value_seen[1] ? instance_verdict::one : instance_verdict::zero, found_size,
            first_witness};
}

}  // namespace circuitlab
