#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "circuitlab/errors.hpp"
#include "circuitlab/gcsp.hpp"
#include "circuitlab/rng.hpp"
#include "circuitlab/stats.hpp"
#include "circuitlab/truth_table.hpp"

namespace circuitlab {

// ---------------------------------------------------------------------------
// Interactive witnessing. A family of oracle procedures W_t^j queries a
// circuit oracle D and proposes candidate inputs where D should differ from
// the hard function H; between rounds a truthful correction oracle reveals
// (D(x), H(x)) for the failed candidate. A candidate must never have been
// queried by the branch earlier in the session.
// ---------------------------------------------------------------------------

struct correction {
    std::uint64_t x;
    bool d_value;
    bool h_value;
};

// Answers candidates truthfully from the session's actual (D, H) pair.
struct correction_oracle {
    std::function<bool(std::uint64_t)> d;
    std::function<bool(std::uint64_t)> h;
    correction answer(std::uint64_t x) const { return {x, d(x), h(x)}; }
};

class witness_family {
public:
    virtual ~witness_family() = default;
    virtual std::uint32_t width() const = 0;      // number of branches
    virtual std::uint32_t max_rounds() const = 0; // t_max
    // Round procedure W_round^branch. Queries to D must go through d_query.
    // Returns the candidate, or nullopt when the branch is exhausted.
    virtual std::optional<std::uint64_t> propose(
        std::uint32_t branch, std::uint32_t round,
        const std::function<bool(std::uint64_t)>& d_query,
        const std::vector<correction>& prior) = 0;
};

struct trace {
    std::vector<std::uint64_t> rounds;
    bool terminal = false;   // ended with D(x_t) != H(x_t)
    bool exhausted = false;  // branch ran out of candidates
};

struct protocol_result {
    trace tr;
    std::vector<correction> corrections;
    std::vector<std::uint64_t> query_log;
};

// Runs one session of the protocol on branch j. Enforces the not-yet-queried
// rule on every candidate; a violation disqualifies the branch by throwing.
inline protocol_result run_protocol(witness_family& f, std::uint32_t branch,
                                    const std::function<bool(std::uint64_t)>& d,
                                    const truth_table& h) {
    if (branch >= f.width()) throw structural_error("run_protocol: branch out of range");
    protocol_result res;
    std::unordered_set<std::uint64_t> queried;
    const std::function<bool(std::uint64_t)> d_query = [&](std::uint64_t x) {
        queried.insert(x);
        res.query_log.push_back(x);
        return d(x);
    };
    const correction_oracle y{d, [&h](std::uint64_t x) { return h.get(x); }};

    for (std::uint32_t round = 1; round <= f.max_rounds(); ++round) {
        const auto candidate = f.propose(branch, round, d_query, res.corrections);
        if (!candidate) {
            res.tr.exhausted = true;
            return res;
        }
        if (queried.count(*candidate))
            throw protocol_violation("candidate was already queried this session");
        res.tr.rounds.push_back(*candidate);
        const correction corr = y.answer(*candidate);
        if (corr.d_value != corr.h_value) {
            res.tr.terminal = true;
            return res;
        }
        res.corrections.push_back(corr);
    }
    return res;  // round budget exhausted, non-terminal
}

// Trace log line format, one row per round.
inline std::string trace_log(const protocol_result& res, const truth_table& h,
                             const std::function<bool(std::uint64_t)>& d) {
    std::string out;
    for (std::size_t i = 0; i < res.tr.rounds.size(); ++i) {
        const std::uint64_t x = res.tr.rounds[i];
        char buf[96];
        const bool witness = i + 1 == res.tr.rounds.size() && res.tr.terminal;
        std::snprintf(buf, sizeof buf, "round=%zu x=%llx D=%d H=%d verdict=%s\n", i + 1,
                      static_cast<unsigned long long>(x), d(x) ? 1 : 0,
                      h.get(x) ? 1 : 0, witness ? "witness" : "corrected");
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force learner fixture: queries D on everything except a held-out set
// and guesses there, so its error is at most |holdout| / 2^n with confidence 1.
// ---------------------------------------------------------------------------

struct learn_result {
    truth_table hypothesis;
    std::vector<std::uint64_t> queried;
};

using learner_fn = std::function<learn_result(const std::function<bool(std::uint64_t)>&)>;

struct holdout_learner {
    std::uint32_t n;
    std::vector<std::uint64_t> holdout;  // sorted, distinct
    std::vector<bool> guesses;           // one per held-out point

    static holdout_learner seeded(std::uint32_t n, std::uint32_t holdout_count,
                                  std::uint64_t seed) {
        if (holdout_count >= (1ull << n))
            throw parameter_error("holdout_learner: holdout too large");
        rng r(seed);
        holdout_learner hl;
        hl.n = n;
        std::unordered_set<std::uint64_t> picked;
        while (picked.size() < holdout_count) picked.insert(r.next_bits(n));
        hl.holdout.assign(picked.begin(), picked.end());
        std::sort(hl.holdout.begin(), hl.holdout.end());
        for (std::size_t i = 0; i < hl.holdout.size(); ++i)
            hl.guesses.push_back(r.next_bit());
        return hl;
    }

    static holdout_learner fixed(std::uint32_t n, std::vector<std::uint64_t> points,
                                 std::vector<bool> guesses) {
        holdout_learner hl;
        hl.n = n;
        hl.holdout = std::move(points);
        std::sort(hl.holdout.begin(), hl.holdout.end());
        hl.guesses = std::move(guesses);
        return hl;
    }

    double error_bound() const {
        return static_cast<double>(holdout.size()) / static_cast<double>(1ull << n);
    }

    learn_result learn(const std::function<bool(std::uint64_t)>& d_query) const {
        learn_result res{truth_table(n), {}};
        for (std::uint64_t x = 0; x < (1ull << n); ++x) {
            const auto it = std::lower_bound(holdout.begin(), holdout.end(), x);
            if (it != holdout.end() && *it == x) {
                res.hypothesis.set(x, guesses[static_cast<std::size_t>(it - holdout.begin())]);
            } else {
                res.hypothesis.set(x, d_query(x));
                res.queried.push_back(x);
            }
        }
        return res;
    }

    learner_fn as_fn() const {
        return [hl = *this](const std::function<bool(std::uint64_t)>& q) {
            return hl.learn(q);
        };
    }
};

// ---------------------------------------------------------------------------
// Witnessing from learning (the converse direction): branch j runs the
// learner against D and emits the j-th unqueried input where the hypothesis
// differs from H.
// ---------------------------------------------------------------------------

class learned_witness_family : public witness_family {
public:
    learned_witness_family(learner_fn learner, truth_table h, std::uint32_t width,
                           double eps_prime)
        : learner_(std::move(learner)), h_(std::move(h)), width_(width),
          eps_prime_(eps_prime) {}

    std::uint32_t width() const override { return width_; }
    std::uint32_t max_rounds() const override { return 1; }
    double eps_prime() const { return eps_prime_; }

    std::optional<std::uint64_t> propose(
        std::uint32_t branch, std::uint32_t /*round*/,
        const std::function<bool(std::uint64_t)>& d_query,
        const std::vector<correction>& /*prior*/) override {
        const learn_result lr = learner_(d_query);
        std::vector<std::uint64_t> sorted_queries = lr.queried;
        std::sort(sorted_queries.begin(), sorted_queries.end());
        std::uint32_t found = 0;
        for (std::uint64_t x = 0; x < h_.num_points(); ++x) {
            if (std::binary_search(sorted_queries.begin(), sorted_queries.end(), x))
                continue;
            if (lr.hypothesis.get(x) == h_.get(x)) continue;
            if (found == branch) return x;
            ++found;
        }
        return std::nullopt;  // fewer than branch+1 unqueried disagreements
    }

private:
    learner_fn learner_;
    truth_table h_;
    std::uint32_t width_;
    double eps_prime_;
};

// Checks the hardness precondition and wraps the learner. Width follows the
// 2^n / 2n width of the converse construction.
inline std::unique_ptr<learned_witness_family> witnesses_from_learning(
    learner_fn learner, const truth_table& h, double eps_prime,
    std::uint32_t hardness_proxy_size,
    std::uint64_t budget = default_enumeration_budget) {
    const std::uint32_t n = h.inputs();
    const double gamma = 1.0 - 1.0 / static_cast<double>(n);
    if (!is_hard(h, hardness_proxy_size, gamma, budget))
        throw parameter_error("witnesses_from_learning: H fails the hardness check");
    const std::uint32_t width =
        std::max<std::uint32_t>(1, (1u << n) / (2 * n));
    return std::make_unique<learned_witness_family>(std::move(learner), h, width,
                                                    eps_prime);
}

// ---------------------------------------------------------------------------
// Oracle-independent candidate schedules (antichecker-style witnessing);
// deterministic traces, used by the reconstruction machinery and as a
// control in the protocol tests.
// ---------------------------------------------------------------------------

class fixed_candidate_family : public witness_family {
public:
    explicit fixed_candidate_family(std::vector<std::vector<std::uint64_t>> schedules)
        : schedules_(std::move(schedules)) {
        std::size_t longest = 0;
        for (const auto& s : schedules_) longest = std::max(longest, s.size());
        max_rounds_ = static_cast<std::uint32_t>(longest);
    }

    std::uint32_t width() const override {
        return static_cast<std::uint32_t>(schedules_.size());
    }
    std::uint32_t max_rounds() const override { return max_rounds_; }

    std::optional<std::uint64_t> propose(
        std::uint32_t branch, std::uint32_t round,
        const std::function<bool(std::uint64_t)>& /*d_query*/,
        const std::vector<correction>& /*prior*/) override {
        const auto& sched = schedules_[branch];
        if (round > sched.size()) return std::nullopt;
        return sched[round - 1];
    }

private:
    std::vector<std::vector<std::uint64_t>> schedules_;
    std::uint32_t max_rounds_ = 0;
};

// ---------------------------------------------------------------------------
// Success-rate experiment: run every branch of the family against a sampled
// circuit distribution and tally terminal traces.
// ---------------------------------------------------------------------------

struct witness_experiment_result {
    std::vector<tally> per_branch;
    std::uint32_t best_branch = 0;
    double best_rate = 0.0;
    std::uint64_t sessions = 0;
    std::uint64_t violations = 0;
};

inline std::vector<std::function<bool(std::uint64_t)>> as_callables(
    const std::vector<circuit>& cs) {
    std::vector<std::function<bool(std::uint64_t)>> out;
    out.reserve(cs.size());
    for (const auto& c : cs)
        out.emplace_back([c](std::uint64_t x) { return eval(c, x); });
    return out;
}

template <typename DFamily>  // DFamily: indexable collection of bool(uint64_t) callables
witness_experiment_result witness_success_rates(witness_family& f,
                                                const DFamily& circuits,
                                                const truth_table& h) {
    witness_experiment_result res;
    res.per_branch.assign(f.width(), {});
    for (const auto& d : circuits) {
        for (std::uint32_t j = 0; j < f.width(); ++j) {
            ++res.sessions;
            bool success = false;
            try {
                const auto pr = run_protocol(f, j, d, h);
                success = pr.tr.terminal;
            } catch (const protocol_violation&) {
                ++res.violations;
            }
            res.per_branch[j].add(success);
        }
    }
    for (std::uint32_t j = 0; j < f.width(); ++j) {
        if (res.per_branch[j].mean() > res.best_rate) {
            res.best_rate = res.per_branch[j].mean();
            res.best_branch = j;
        }
    }
    return res;
}

}  // namespace circuitlab
