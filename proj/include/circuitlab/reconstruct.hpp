#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "circuitlab/design.hpp"
#include "circuitlab/errors.hpp"
#include "circuitlab/generator.hpp"
#include "circuitlab/learning.hpp"
#include "circuitlab/stats.hpp"
#include "circuitlab/witness.hpp"

namespace circuitlab {

// ---------------------------------------------------------------------------
// Frequent traces. Sample NW seeds w, run the protocol on the row function of
// each w, and grow the most frequent trace prefix greedily: extend while the
// strict-extension mass is at least one third of the prefix mass. The full
// probability accounting over all seeds is replaced by seeded Monte-Carlo
// with confidence intervals.
// ---------------------------------------------------------------------------

struct trace_thresholds {
    double min_frequency = 0.02;     // below this: frequent-trace-not-found
    double extension_ratio = 1.0 / 3.0;
    double tolerance = 0.05;         // slack on the 1 - 3/n^3 success pre-check
    std::uint32_t max_a_candidates = 4;
};

struct trace_mass {
    std::uint64_t terminal_at = 0;   // trace == Tr, ends with a witness
    std::uint64_t stalled_at = 0;    // trace == Tr as a sequence, no witness
    std::uint64_t extends = 0;       // strictly extends Tr
    std::uint64_t other = 0;         // everything else
    std::uint64_t total() const { return terminal_at + stalled_at + extends + other; }
};

struct frequent_trace_result {
    bool ok = false;                 // false: distribution-failure report
    std::uint32_t branch = 0;
    std::vector<std::uint64_t> trace;
    bitstring off_row;               // chosen suffix assignment a
    std::vector<double> branch_rates;
    double best_rate = 0.0;
    interval best_rate_ci{0, 1};
    double required_rate = 0.0;      // 1 - 3/n^3 - tolerance
    double trace_frequency = 0.0;    // terminal trace == Tr among samples
    interval trace_frequency_ci{0, 1};
    trace_mass mass;
    double a_productivity = 0.0;     // exact fraction of u reproducing Tr with chosen a
    std::uint64_t samples = 0;
};

inline frequent_trace_result find_frequent_trace(const nw_generator& gen,
                                                 witness_family& f,
                                                 const truth_table& h,
                                                 std::uint64_t samples,
                                                 trace_thresholds th,
                                                 std::uint64_t seed) {
    gen.check();
    const std::uint32_t n = gen.a.log_rows;
    if (h.inputs() != n)
        throw structural_error("find_frequent_trace: H arity != design rows");
    rng master(seed);

    // Sampled seeds and their traces, per branch.
    std::vector<bitstring> ws;
    ws.reserve(samples);
    rng wr = master.derive(0);
    for (std::uint64_t t = 0; t < samples; ++t)
        ws.push_back(bitstring::random(gen.a.universe, wr));

    auto row_oracle = [&gen](const bitstring& w) {
        return [&gen, &w](std::uint64_t x) { return nw_row(gen, w, x); };
    };

    frequent_trace_result res;
    res.samples = samples;
    res.required_rate = 1.0 - 3.0 / (double(n) * n * n) - th.tolerance;

    std::vector<std::vector<trace>> traces(f.width());
    for (std::uint32_t j = 0; j < f.width(); ++j) {
        traces[j].reserve(samples);
        tally succ;
        for (const auto& w : ws) {
            const auto pr = run_protocol(f, j, row_oracle(w), h);
            succ.add(pr.tr.terminal);
            traces[j].push_back(pr.tr);
        }
        res.branch_rates.push_back(succ.mean());
        if (j == 0 || succ.mean() > res.best_rate) {  // ties keep the earliest branch
            res.best_rate = succ.mean();
            res.branch = j;
            res.best_rate_ci = succ.ci95();
        }
    }
    if (res.best_rate < res.required_rate) return res;  // ok stays false

    const auto& tr = traces[res.branch];

    // Greedy prefix growth.
    std::vector<std::uint64_t> prefix;
    auto starts_with = [](const trace& t, const std::vector<std::uint64_t>& p) {
        if (t.rounds.size() < p.size()) return false;
        return std::equal(p.begin(), p.end(), t.rounds.begin());
    };
    for (;;) {
        std::map<std::uint64_t, std::uint64_t> next_count;
        for (const auto& t : tr)
            if (t.rounds.size() > prefix.size() && starts_with(t, prefix))
                ++next_count[t.rounds[prefix.size()]];
        if (next_count.empty()) break;
        std::uint64_t best_x = 0, best_c = 0;
        for (const auto& [x, c] : next_count)
            if (c > best_c) {
                best_c = c;
                best_x = x;
            }
        prefix.push_back(best_x);
        if (prefix.size() >= f.max_rounds()) break;
        std::uint64_t prefix_mass = 0, ext_mass = 0;
        for (const auto& t : tr) {
            if (!starts_with(t, prefix)) continue;
            ++prefix_mass;
            if (t.rounds.size() > prefix.size()) ++ext_mass;
        }
        if (static_cast<double>(ext_mass) <
            th.extension_ratio * static_cast<double>(prefix_mass))
            break;  // the trace stops here often enough
    }
    if (prefix.empty())
        throw not_found_error("find_frequent_trace: no candidate was ever proposed");
    res.trace = prefix;

    // Mass accounting; sums to the sample count exactly.
    tally freq;
    for (const auto& t : tr) {
        const bool eq = t.rounds == prefix;
        if (eq && t.terminal)
            ++res.mass.terminal_at;
        else if (eq)
            ++res.mass.stalled_at;
        else if (starts_with(t, prefix) && t.rounds.size() > prefix.size())
            ++res.mass.extends;
        else
            ++res.mass.other;
        freq.add(eq && t.terminal);
    }
    res.trace_frequency = freq.mean();
    res.trace_frequency_ci = freq.ci95();
    if (res.trace_frequency < th.min_frequency)
        throw not_found_error("find_frequent_trace: frequent trace below minimum "
                              "frequency " +
                              std::to_string(res.trace_frequency));

    // Candidate suffix assignments a from the sampled good seeds; keep the one
    // whose completions r_{X_t}(u, a) reproduce the trace most often, measured
    // exactly over all u.
    const std::uint64_t x_t = prefix.back();
    std::vector<bitstring> candidates;
    for (std::size_t k = 0; k < tr.size() && candidates.size() < th.max_a_candidates;
         ++k) {
        if (!(tr[k].rounds == prefix && tr[k].terminal)) continue;
        bitstring a = complement_bits(ws[k], gen.a, x_t);
        bool dup = false;
        for (const auto& c : candidates)
            if (c == a) dup = true;
        if (!dup) candidates.push_back(std::move(a));
    }
    const std::uint64_t u_space = std::uint64_t(1) << gen.a.set_size;
    double best_prod = -1.0;
    for (const auto& a : candidates) {
        std::uint64_t good = 0;
        for (std::uint64_t u = 0; u < u_space; ++u) {
            const bitstring w =
                assemble(gen.a, x_t, bitstring::from_uint(gen.a.set_size, u), a);
            const auto pr = run_protocol(f, res.branch, row_oracle(w), h);
            if (pr.tr.rounds == prefix && pr.tr.terminal) ++good;
        }
        const double prod = static_cast<double>(good) / static_cast<double>(u_space);
        if (prod > best_prod) {
            best_prod = prod;
            res.off_row = a;
        }
    }
    res.a_productivity = best_prod;
    res.ok = true;
    return res;
}

// ---------------------------------------------------------------------------
// Correction sets: for a distinguished row X and suffix a', pre-query the
// base circuit so that every protocol query at a row x != X can be answered
// for every u. The design property keeps each table at 2^overlap <= 2^deg
// entries.
// ---------------------------------------------------------------------------

struct correction_sets {
    std::uint64_t distinguished_row = 0;
    bitstring off_row;
    // Per row x: positions of u feeding the overlap, and the C-values for
    // every overlap pattern (pattern bit k = u bit overlap_u_bits[x][k]).
    std::vector<std::vector<std::uint32_t>> overlap_u_bits;
    std::vector<std::vector<std::uint8_t>> table;
    truth_table h_advice;
    std::uint64_t query_count = 0;
    std::vector<query_record> queries;
};

inline correction_sets build_correction_sets(const design_matrix& a,
                                             std::uint64_t distinguished_row,
                                             const bitstring& off_row, oracle& target,
                                             const truth_table& h_advice,
                                             std::uint64_t query_budget = 1ull << 22) {
    if (off_row.size() != a.universe - a.set_size)
        throw structural_error("correction_sets: off-row assignment length mismatch");
    correction_sets cs;
    cs.distinguished_row = distinguished_row;
    cs.off_row = off_row;
    cs.h_advice = h_advice;
    const auto& dist_row = a.rows[distinguished_row];

    // Rank of a universe position inside the off-row ordering.
    std::vector<std::uint32_t> comp_rank(a.universe, 0);
    {
        std::uint32_t rank = 0, r = 0;
        for (std::uint64_t pos = 0; pos < a.universe; ++pos) {
            if (r < dist_row.size() && dist_row[r] == pos) {
                ++r;
                continue;
            }
            comp_rank[pos] = rank++;
        }
    }
    cs.overlap_u_bits.resize(a.rows.size());
    cs.table.resize(a.rows.size());
    for (std::uint64_t x = 0; x < a.rows.size(); ++x) {
        if (x == distinguished_row) continue;
        const auto& row = a.rows[x];
        std::uint64_t base = 0;
        std::vector<std::uint32_t> free_input_bits;  // C-input bit per overlap entry
        for (std::size_t k = 0; k < row.size(); ++k) {
            const std::uint32_t pos = row[k];
            const auto it = std::lower_bound(dist_row.begin(), dist_row.end(), pos);
            if (it != dist_row.end() && *it == pos) {
                cs.overlap_u_bits[x].push_back(
                    static_cast<std::uint32_t>(it - dist_row.begin()));
                free_input_bits.push_back(static_cast<std::uint32_t>(k));
            } else if (off_row.get(comp_rank[pos])) {
                base |= 1ull << k;
            }
        }
        const std::size_t patterns = std::size_t(1) << free_input_bits.size();
        if (cs.query_count + patterns > query_budget)
            throw budget_error("correction_sets: query budget exceeded");
        cs.table[x].resize(patterns);
        for (std::size_t sigma = 0; sigma < patterns; ++sigma) {
            std::uint64_t input = base;
            for (std::size_t k = 0; k < free_input_bits.size(); ++k) {
                if ((sigma >> k) & 1)
                    input |= 1ull << free_input_bits[k];
                else
                    input &= ~(1ull << free_input_bits[k]);
            }
            cs.table[x][sigma] = target.query(input) ? 1 : 0;
            ++cs.query_count;
        }
    }
    cs.queries = target.log();
    return cs;
}

// ---------------------------------------------------------------------------
// The reconstructor D'. Given a guessed (branch, trace, a', maj) and the
// correction sets, it simulates the protocol on r_X(u, a') for each u and
// outputs the bit forced by H at the guessed terminal row; any deviation
// falls back to maj.
// ---------------------------------------------------------------------------

struct trace_guess {
    std::uint32_t branch = 0;
    std::vector<std::uint64_t> trace;
    bool maj = false;
};

namespace detail {
struct advice_miss {};
}  // namespace detail

inline predictor reconstruct_predictor(const std::shared_ptr<witness_family>& f,
                                       const design_matrix& a, const trace_guess& guess,
                                       const std::shared_ptr<const correction_sets>& sets) {
    if (guess.trace.empty())
        throw structural_error("reconstruct_predictor: empty trace guess");
    predictor p;
    p.mode = query_mode::nonadaptive_membership;
    p.input_bits = a.set_size;
    p.setup_queries = sets->queries;
    const design_matrix dm = a;
    p.predict_fn = [f, dm, guess, sets](std::uint64_t u) -> bool {
        auto lookup = [&](std::uint64_t x) -> bool {
            if (x == sets->distinguished_row || x >= sets->table.size())
                throw detail::advice_miss{};
            const auto& ubits = sets->overlap_u_bits[x];
            std::size_t sigma = 0;
            for (std::size_t k = 0; k < ubits.size(); ++k)
                if ((u >> ubits[k]) & 1) sigma |= std::size_t(1) << k;
            if (sigma >= sets->table[x].size()) throw detail::advice_miss{};
            return sets->table[x][sigma] != 0;
        };
        std::vector<correction> corrections;
        const auto t = guess.trace.size();
        try {
            for (std::size_t i = 1; i <= t; ++i) {
                const auto candidate = f->propose(
                    guess.branch, static_cast<std::uint32_t>(i), lookup, corrections);
                if (!candidate || *candidate != guess.trace[i - 1]) return guess.maj;
                if (i == t) break;
                // The guessed trace continues, so the protocol must have been
                // corrected here: D_w must agree with H at this candidate.
                const bool dv = lookup(*candidate);
                if (dv != sets->h_advice.get(*candidate)) return guess.maj;
                corrections.push_back({*candidate, dv, sets->h_advice.get(*candidate)});
            }
        } catch (const detail::advice_miss&) {
            return guess.maj;  // incomplete advice counts as a deviation
        }
        return !sets->h_advice.get(guess.trace.back());
    };
    return p;
}

// End-to-end learner: draw (branch, trace, a', maj) uniformly a configured
// number of times, query the target to fill each guess's correction sets,
// and keep the empirically best reconstructor.
struct reconstruction_learner_options {
    std::uint32_t guesses = 64;
    std::uint64_t boost_tests = 500;
    std::uint64_t set_budget = 1ull << 22;
};

struct reconstruction_learner_result {
    predictor best;
    trace_guess best_guess;
    boost_report boost_stats;
    std::uint64_t total_queries = 0;
};

inline reconstruction_learner_result reconstruction_learner(
    const std::shared_ptr<witness_family>& f, const design_matrix& a,
    const truth_table& h, oracle& target, reconstruction_learner_options opts,
    std::uint64_t seed) {
    rng master(seed);
    std::vector<predictor> candidates;
    std::vector<trace_guess> guesses;
    std::uint64_t queries = 0;
    for (std::uint32_t g = 0; g < opts.guesses; ++g) {
        rng gr = master.derive(g);
        trace_guess guess;
        guess.branch = static_cast<std::uint32_t>(gr.next_below(f->width()));
        const std::uint32_t t =
            1 + static_cast<std::uint32_t>(gr.next_below(f->max_rounds()));
        for (std::uint32_t i = 0; i < t; ++i)
            guess.trace.push_back(gr.next_below(a.num_rows()));
        guess.maj = gr.next_bit();
        const bitstring a_prime =
            bitstring::random(a.universe - a.set_size, gr);
        target.clear_log();
        const auto sets = std::make_shared<correction_sets>(build_correction_sets(
            a, guess.trace.back(), a_prime, target, h, opts.set_budget));
        queries += sets->query_count;
        candidates.push_back(reconstruct_predictor(f, a, guess, sets));
        guesses.push_back(std::move(guess));
    }
    target.clear_log();
    rng br = master.derive(0xb005);
    const auto rep = boost_select(
        candidates, [](const predictor& p, std::uint64_t u) { return p.predict(u); },
        target, a.set_size, opts.boost_tests, br);
    return {candidates[rep.winner_index], guesses[rep.winner_index], rep, queries};
}

struct measure_report {
    double agreement;  // Pr[P(u) = C(u)]
    interval ci95;
    std::uint64_t samples;  // 0 for exact enumeration
};

inline measure_report measure_predictor(const predictor& p,
                                        const std::function<bool(std::uint64_t)>& target,
                                        std::uint64_t samples, std::uint64_t seed) {
    tally t;
    if (samples == 0) {
        const std::uint64_t space = std::uint64_t(1) << p.input_bits;
        for (std::uint64_t u = 0; u < space; ++u) t.add(p.predict(u) == target(u));
        return {t.mean(), {t.mean(), t.mean()}, 0};
    }
    rng r(seed);
    for (std::uint64_t k = 0; k < samples; ++k) {
        const std::uint64_t u = r.next_bits(p.input_bits);
        t.add(p.predict(u) == target(u));
    }
    return {t.mean(), t.ci95(), samples};
}

// ---------------------------------------------------------------------------
// Learning speedup: bundle the inner learner's example queries across all
// completions of a partially fixed NW seed, and predict the free bits through
// the simulated learner. The bundle has at most t * 2^b entries by the design
// property.
// ---------------------------------------------------------------------------

// Predicts the row function at `challenge` from labeled example rows.
using inner_learner =
    std::function<bool(const std::vector<std::pair<std::uint64_t, bool>>& examples,
                       std::uint64_t challenge, rng& r)>;

struct speedup_options {
    std::uint32_t example_count = 1;       // t, at most the learner's size budget
    std::uint64_t bundle_budget = 1 << 20;
    std::uint32_t collision_retries = 64;
};

struct speedup_result {
    predictor d_prime;        // on set_size inputs
    std::uint64_t bundle_size = 0;
    std::uint64_t bundle_cap = 0;  // t * 2^b
    std::uint64_t challenge_row = 0;
    std::vector<std::uint64_t> example_rows;
};

inline speedup_result speedup_transform(const inner_learner& learner,
                                        const design_matrix& a, oracle& target,
                                        speedup_options opts, std::uint64_t seed) {
    rng master(seed);
    const std::uint32_t t = opts.example_count;
    const std::uint64_t rows = a.num_rows();
    if (t == 0) throw parameter_error("speedup_transform: need at least one example");

    speedup_result res;
    res.bundle_cap = std::uint64_t(t) << a.log_rows;
    rng draw = master.derive(0);
    // The challenge row must differ from every example row. Example rows are
    // drawn with replacement, so at desk scale they can cover every row; in
    // that case the whole (y^1..y^t, x) tuple is redrawn.
    bool found = false;
    for (std::uint32_t attempt = 0; attempt < opts.collision_retries && !found;
         ++attempt) {
        res.example_rows.clear();
        for (std::uint32_t j = 0; j < t; ++j)
            res.example_rows.push_back(draw.next_below(rows));
        for (std::uint32_t xa = 0; xa < 16; ++xa) {
            const std::uint64_t x = draw.next_below(rows);
            if (std::find(res.example_rows.begin(), res.example_rows.end(), x) ==
                res.example_rows.end()) {
                res.challenge_row = x;
                found = true;
                break;
            }
        }
    }
    if (!found)
        throw parameter_error("speedup_transform: challenge collides with every draw");

    const auto& challenge_set = a.rows[res.challenge_row];
    bitstring fixed = bitstring::random(a.universe - a.set_size, draw);

    // Off-row rank map for the challenge row.
    std::vector<std::uint32_t> comp_rank(a.universe, 0);
    {
        std::uint32_t rank = 0, r = 0;
        for (std::uint64_t pos = 0; pos < a.universe; ++pos) {
            if (r < challenge_set.size() && challenge_set[r] == pos) {
                ++r;
                continue;
            }
            comp_rank[pos] = rank++;
        }
    }

    // Bundled query tables, one per example row.
    struct bundle {
        std::vector<std::uint32_t> u_bits;  // pattern bit k reads u bit u_bits[k]
        std::vector<std::uint8_t> values;
    };
    std::vector<bundle> bundles;
    for (std::uint64_t y : res.example_rows) {
        const auto& row = a.rows[y];
        bundle b;
        std::uint64_t base = 0;
        std::vector<std::uint32_t> free_input_bits;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const std::uint32_t pos = row[k];
            const auto it = std::lower_bound(challenge_set.begin(), challenge_set.end(), pos);
            if (it != challenge_set.end() && *it == pos) {
                b.u_bits.push_back(static_cast<std::uint32_t>(it - challenge_set.begin()));
                free_input_bits.push_back(static_cast<std::uint32_t>(k));
            } else if (fixed.get(comp_rank[pos])) {
                base |= 1ull << k;
            }
        }
        const std::size_t patterns = std::size_t(1) << free_input_bits.size();
        if (res.bundle_size + patterns > opts.bundle_budget)
            throw budget_error("speedup_transform: bundle budget exceeded");
        b.values.resize(patterns);
        for (std::size_t sigma = 0; sigma < patterns; ++sigma) {
            std::uint64_t input = base;
            for (std::size_t k = 0; k < free_input_bits.size(); ++k)
                if ((sigma >> k) & 1) input |= 1ull << free_input_bits[k];
            b.values[sigma] = target.query(input) ? 1 : 0;
        }
        res.bundle_size += patterns;
        bundles.push_back(std::move(b));
    }

    predictor p;
    p.mode = query_mode::nonadaptive_membership;
    p.input_bits = a.set_size;
    p.seed = seed;
    p.setup_queries = target.log();
    const auto example_rows = res.example_rows;
    const auto challenge_row = res.challenge_row;
    p.predict_fn = [learner, bundles, example_rows, challenge_row,
                    seed](std::uint64_t u) -> bool {
        std::vector<std::pair<std::uint64_t, bool>> examples;
        examples.reserve(bundles.size());
        for (std::size_t j = 0; j < bundles.size(); ++j) {
            const auto& b = bundles[j];
            std::size_t sigma = 0;
            for (std::size_t k = 0; k < b.u_bits.size(); ++k)
                if ((u >> b.u_bits[k]) & 1) sigma |= std::size_t(1) << k;
            examples.emplace_back(example_rows[j], b.values[sigma] != 0);
        }
        rng r(seed ^ (0x9e3779b97f4a7c15ull * (u + 1)));
        return learner(examples, challenge_row, r);
    };
    res.d_prime = std::move(p);
    return res;
}

// Inner learner that replays the BFKL rule against a distinguisher: draws a
// stage, fills the labeled prefix from the provided examples, and guesses the
// rest. Needs at least blocks-1 examples.
inline inner_learner bfkl_inner_learner(distinguisher d, std::uint32_t blocks,
                                        std::uint32_t n) {
    return [d = std::move(d), blocks, n](
               const std::vector<std::pair<std::uint64_t, bool>>& examples,
               std::uint64_t challenge, rng& r) -> bool {
        if (examples.size() + 1 < blocks)
            throw parameter_error("bfkl_inner_learner: not enough examples");
        bfkl_draw draw;
        draw.stage = 1 + static_cast<std::uint32_t>(r.next_below(blocks));
        for (std::uint32_t i = 0; i + 1 < draw.stage; ++i) {
            draw.prefix_x.push_back(examples[i].first);
            draw.prefix_label.push_back(examples[i].second);
        }
        for (std::uint32_t i = draw.stage; i <= blocks; ++i)
            draw.guess_bits.push_back(r.next_bit());
        for (std::uint32_t i = draw.stage; i < blocks; ++i)
            draw.suffix_x.push_back(r.next_bits(n));
        return draw.guess_bits[0] ^ d(bfkl_assemble(draw, n, blocks, challenge));
    };
}

// Exact-by-construction inner learner for calibration: echoes the label of
// the matching example row, falling back to the first label.
inline inner_learner lookup_inner_learner() {
    return [](const std::vector<std::pair<std::uint64_t, bool>>& examples,
              std::uint64_t challenge, rng&) -> bool {
        for (const auto& [row, lab] : examples)
            if (row == challenge) return lab;
        return examples.front().second;
    };
}

}  // namespace circuitlab
