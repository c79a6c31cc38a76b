// Batch experiment harness. Every subcommand writes one CSV (deterministic
// for a fixed master seed) and prints a human-readable summary with the
// config echo, config hash, and wall-clock runtime to stdout.
//
// Exit codes: 0 ok, 2 usage/config, 3 budget exceeded, 4 verification failed,
// 1 other errors.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circuitlab/enumerate.hpp"
#include "circuitlab/game.hpp"
#include "circuitlab/gcsp.hpp"
#include "circuitlab/learning.hpp"
#include "circuitlab/reconstruct.hpp"
#include "circuitlab/witness.hpp"

using namespace circuitlab;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string default_out(const std::string& name) {
    if (const char* dir = std::getenv("CIRCUITLAB_OUT"))
        return (std::filesystem::path(dir) / (name + ".csv")).string();
    return name + ".csv";
}

class report {
public:
    report(std::string subcommand, std::uint64_t seed)
        : subcommand_(std::move(subcommand)), seed_(seed) {
        start_ = std::chrono::steady_clock::now();
    }

    void config(const std::string& key, const std::string& value) {
        config_ += (config_.empty() ? "" : " ") + key + "=" + value;
    }
    void config(const std::string& key, std::uint64_t value) {
        config(key, std::to_string(value));
    }
    void config(const std::string& key, double value) {
        std::ostringstream os;
        os << value;
        config(key, os.str());
    }

    std::ostringstream& csv() { return csv_; }

    void note(const std::string& line) { notes_.push_back(line); }

    int finish(const std::string& out_path) {
        const std::string echo = "subcommand=" + subcommand_ + " " + config_ +
                                 " seed=" + std::to_string(seed_);
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx",
                      static_cast<unsigned long long>(fnv1a(echo)));
        std::ofstream out(out_path);
        if (!out) throw error("cannot open output file: " + out_path);
        out << "# " << echo << "\n# config_hash=" << hash << "\n" << csv_.str();
        out.close();

        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::cout << echo << "\nconfig_hash=" << hash << "\n";
        for (const auto& lin : notes_) std::cout << lin << "\n";
        std::cout << "csv=" << out_path << "\nruntime_ms=" << elapsed << "\n";
        return 0;
    }

private:
    std::string subcommand_;
    std::uint64_t seed_;
    std::string config_;
    std::ostringstream csv_;
    std::vector<std::string> notes_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<std::pair<std::uint64_t, bool>> parse_samples(const std::string& text) {
    std::vector<std::pair<std::uint64_t, bool>> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw parameter_error("bad sample entry (want y=b): " + item);
        out.emplace_back(std::stoull(item.substr(0, eq)),
                         std::stoul(item.substr(eq + 1)) != 0);
    }
    return out;
}

circuit load_or_random_circuit(const std::string& file, std::uint32_t n,
                               std::uint32_t size, rng& r) {
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw parameter_error("cannot read circuit file: " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_text(ss.str(), n);
    }
    return random_circuit(n, size, r);
}

// --------------------------------------------------------------------------
// Subcommand bodies
// --------------------------------------------------------------------------

int cmd_design(std::uint32_t b, std::uint32_t l, std::uint32_t deg,
               const std::string& out, const std::string& dump,
               std::uint64_t seed) {
    report rep("design", seed);
    rep.config("b", std::uint64_t(b));
    rep.config("l", std::uint64_t(l));
    rep.config("deg", std::uint64_t(deg));
    const design_matrix d = make_design(b, l, deg);
    rep.csv() << "row,cells\n";
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        rep.csv() << i << ",\"";
        for (std::size_t k = 0; k < d.rows[i].size(); ++k)
            rep.csv() << (k ? " " : "") << d.rows[i][k];
        rep.csv() << "\"\n";
    }
    if (!dump.empty()) {
        std::ofstream df(dump);
        df << dump_design(d);
    }
    const std::size_t worst = max_pairwise_intersection(d);
    rep.note("p=" + std::to_string(d.field_prime) + " m=" + std::to_string(d.universe));
    rep.note("MAX_INTERSECT=" + std::to_string(worst));
    if (worst > deg) throw pipeline_error("design property violated", double(worst));
    return rep.finish(out);
}

int cmd_gcsp(std::uint32_t n, std::uint32_t size, const std::string& samples_text,
             std::uint64_t budget, const std::string& out, std::uint64_t seed) {
    report rep("gcsp", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("size", std::uint64_t(size));
    rep.config("samples", samples_text);
    rep.config("budget", budget);
    const sample_list samples(n, parse_samples(samples_text));
    const auto res = gcsp(samples, size, budget);
    rep.csv() << "y,b\n";
    for (const auto& [y, bb] : samples.samples()) rep.csv() << y << "," << bb << "\n";
    rep.note(res.satisfiable ? "verdict=YES" : "verdict=NO");
    if (res.witness) {
        rep.note("witness=" + label(*res.witness));
        rep.csv() << "# witness=\"" << label(*res.witness) << "\"\n";
    }
    return rep.finish(out);
}

int cmd_bfkl(std::uint32_t n, std::uint32_t m, bool exact, std::uint64_t samples,
             const std::string& out, std::uint64_t seed) {
    report rep("bfkl", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("m", std::uint64_t(m));
    rep.config("mode", exact ? "exact" : "mc");
    // The canonical toy instance: target C = x0, distinguisher flags a label
    // disagreeing with C on the first block.
    const circuit c = projection(n, 0);
    const auto d = distinguisher::from_circuit(block_disagreement_tester(c, m, 0));
    if (exact) {
        const auto st = bfkl_exact(d, c, m);
        rep.csv() << "stage,hybrid_pr,gap,stage_correct\n";
        for (std::uint32_t i = 1; i <= m; ++i)
            rep.csv() << i << "," << st.hybrid[i - 1] << "," << st.hybrid_gap(i) << ","
                      << st.stage_correct[i - 1] << "\n";
        rep.csv() << m + 1 << "," << st.hybrid[m] << ",,\n";
        double best = 0, mean = 0;
        for (const auto& [w, adv] : st.config_advantages) {
            best = std::max(best, adv);
            mean += w * adv;
        }
        rep.note("distinguishing_advantage=" + std::to_string(st.advantage));
        rep.note("predictor_best_advantage=" + std::to_string(best));
        rep.note("predictor_mean_advantage=" + std::to_string(mean));
        rep.note("confidence_at_3_4=" + std::to_string(st.confidence(0.75)));
    } else {
        oracle target = oracle::from_circuit(c);
        rng r(seed);
        rep.csv() << "predictor_seed,advantage\n";
        double best = 0;
        for (std::uint64_t k = 0; k < 16; ++k) {
            target.clear_log();
            const predictor p = make_bfkl_predictor(d, m, n, target, r.derive(k).next_u64());
            tally t;
            rng cr = r.derive(1000 + k);
            for (std::uint64_t q = 0; q < samples; ++q) {
                const std::uint64_t x = cr.next_bits(n);
                t.add(p.predict(x) == eval(c, x));
            }
            rep.csv() << k << "," << t.mean() << "\n";
            best = std::max(best, t.mean());
        }
        rep.note("predictor_best_advantage=" + std::to_string(best));
    }
    return rep.finish(out);
}

int cmd_natural_learn(std::uint32_t n, std::uint32_t c_exp, std::uint32_t d_exp,
                      const std::string& target_file, std::uint64_t boost_tests,
                      std::uint64_t measure_points, const std::string& out,
                      std::uint64_t seed) {
    report rep("natural-learn", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("c", std::uint64_t(c_exp));
    rep.config("d", std::uint64_t(d_exp));
    rep.config("boost_tests", boost_tests);
    rng r(seed);
    auto ipow = [](std::uint64_t b, std::uint32_t e) {
        std::uint64_t v = 1;
        while (e--) v *= b;
        return v;
    };
    const circuit target = load_or_random_circuit(
        target_file, n, static_cast<std::uint32_t>(ipow(n, c_exp)), r);
    rep.config("target", label(target));
    natural_learner_options opts;
    opts.boost_tests = boost_tests;
    const auto res = natural_proof_learner(target, c_exp, d_exp, seed, opts);
    tally adv;
    rng mr(seed ^ 0xabcdef);
    for (std::uint64_t k = 0; k < measure_points; ++k) {
        const std::uint64_t x = mr.next_bits(n);
        adv.add(res.best.predict(x) == eval(target, x));
    }
    rep.csv() << "blocks,uniform_accept,generator_rejects,seeds,boost_agreement,"
                 "advantage,ci_lo,ci_hi\n";
    rep.csv() << res.blocks << "," << res.uniform_accept << "," << res.generator_rejects
              << "," << res.seed_count << "," << res.boost_stats.empirical_agreement
              << "," << adv.mean() << "," << adv.ci95().lo << "," << adv.ci95().hi
              << "\n";
    rep.note("uniform_accept=" + std::to_string(res.uniform_accept));
    rep.note("measured_advantage=" + std::to_string(adv.mean()));
    return rep.finish(out);
}

int cmd_dichotomy(std::uint32_t n, std::uint32_t c_exp, std::uint32_t s,
                  std::uint32_t m, std::uint32_t row_size, std::uint32_t cols,
                  std::uint32_t col_size, const std::string& out, std::uint64_t seed) {
    report rep("dichotomy", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("c", std::uint64_t(c_exp));
    rep.config("s", std::uint64_t(s));
    rep.config("m", std::uint64_t(m));
    rep.config("row_size", std::uint64_t(row_size));
    rep.config("cols", std::uint64_t(cols));
    rep.config("col_size", std::uint64_t(col_size));
    std::vector<circuit> rows;
    for_each_circuit(n, row_size, default_enumeration_budget,
                     [&](const circuit& c) { rows.push_back(c); });
    rng r(seed);
    std::vector<circuit> col_family;
    for (std::uint32_t j = 0; j < cols; ++j)
        col_family.push_back(random_circuit(m * (n + 1), col_size, r));
    dichotomy_options opts;
    opts.blocks = m;
    opts.safety = s;
    opts.c_exp = c_exp;
    const auto res = dichotomy(rows, col_family, opts, seed);
    rep.csv() << res.matrix.to_csv();
    rep.csv() << "# " << res.verdict_line << "\n";
    rep.note(res.verdict_line);
    rep.note("certificate_bound=" + std::to_string(res.certificate_bound));
    rep.note("column family is a seeded sample; the verdict is relative to it");
    return rep.finish(out);
}

int cmd_anticheckers(std::uint32_t n, std::uint32_t t, std::uint32_t count,
                     std::uint32_t hard_size, double hard_gamma,
                     std::uint32_t trials, const std::string& h_file,
                     const std::string& h_out, const std::string& out,
                     std::uint64_t seed) {
    report rep("anticheckers", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("t", std::uint64_t(t));
    rep.config("count", std::uint64_t(count));
    rep.config("hard_size", std::uint64_t(hard_size));
    rep.config("hard_gamma", hard_gamma);
    truth_table h(n);
    if (!h_file.empty()) {
        std::ifstream in(h_file);
        if (!in) throw parameter_error("cannot read truth table file: " + h_file);
        std::stringstream ss;
        ss << in.rdbuf();
        h = truth_table::from_file(ss.str());
        if (h.inputs() != n) throw parameter_error("truth table file arity mismatch");
    } else {
        h = sample_hard_function(n, hard_size, hard_gamma, trials, seed);
    }
    if (!h_out.empty()) {
        std::ofstream hf(h_out);
        hf << h.to_file();
    }
    const auto res = find_anticheckers(h, t, count, seed ^ 0x5eed);
    rep.csv() << "index,point\n";
    for (std::size_t i = 0; i < res.multiset.size(); ++i)
        rep.csv() << i << "," << res.multiset[i] << "\n";
    rep.note("H=" + h.to_hex());
    rep.note("game_value=" + std::to_string(res.v));
    rep.note("epsilon=" + std::to_string(res.epsilon));
    rep.note("error_floor=" + std::to_string(res.floor));
    rep.note("distinct_functions=" + std::to_string(res.distinct_functions));
    return rep.finish(out);
}

int cmd_witness(std::uint32_t n, std::uint32_t d_size, std::uint32_t count,
                std::uint32_t holdout, std::uint32_t trials,
                const std::string& trace_log_path, const std::string& out,
                std::uint64_t seed) {
    report rep("witness", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("d_size", std::uint64_t(d_size));
    rep.config("count", std::uint64_t(count));
    rep.config("holdout", std::uint64_t(holdout));
    const double gamma = 1.0 - 1.0 / static_cast<double>(n);
    const truth_table h = sample_hard_function(n, 1, gamma, trials, seed);
    // A learner whose held-out guesses all agree with H can never produce a
    // candidate; pick the first seeded learner that is not degenerate.
    holdout_learner hl = holdout_learner::seeded(n, holdout, seed ^ 0x11);
    std::uint32_t learner_draw = 0;
    for (; learner_draw < 32; ++learner_draw) {
        hl = holdout_learner::seeded(n, holdout, (seed ^ 0x11) + learner_draw);
        bool live = false;
        for (std::size_t i = 0; i < hl.holdout.size(); ++i)
            if (hl.guesses[i] != h.get(hl.holdout[i])) live = true;
        if (live) break;
    }
    rep.config("learner_draw", std::uint64_t(learner_draw));
    auto family = witnesses_from_learning(hl.as_fn(), h, hl.error_bound(), 1);
    rng r(seed ^ 0x22);
    std::vector<circuit> ds;
    for (std::uint32_t i = 0; i < count; ++i) ds.push_back(random_circuit(n, d_size, r));
    const auto res = witness_success_rates(*family, as_callables(ds), h);
    rep.csv() << "branch,successes,sessions,rate,ci_lo,ci_hi\n";
    for (std::size_t j = 0; j < res.per_branch.size(); ++j) {
        const auto& t = res.per_branch[j];
        rep.csv() << j << "," << t.hits << "," << t.trials << "," << t.mean() << ","
                  << t.ci95().lo << "," << t.ci95().hi << "\n";
    }
    const double bound = 1.0 - 2.0 * hl.error_bound() * n;
    rep.note("best_branch=" + std::to_string(res.best_branch));
    rep.note("best_rate=" + std::to_string(res.best_rate));
    rep.note("counting_bound=" + std::to_string(bound));
    rep.note("violations=" + std::to_string(res.violations));
    if (!trace_log_path.empty()) {
        std::ofstream tl(trace_log_path);
        const std::size_t shown = std::min<std::size_t>(8, ds.size());
        for (std::size_t i = 0; i < shown; ++i) {
            const circuit& dc = ds[i];
            const auto d = [&dc](std::uint64_t x) { return eval(dc, x); };
            tl << "# session " << i << "\n";
            tl << trace_log(run_protocol(*family, res.best_branch, d, h), h, d);
        }
        rep.note("trace_log=" + trace_log_path);
    }
    return rep.finish(out);
}

int cmd_reconstruct(std::uint32_t n, std::uint32_t d_exp, std::uint64_t samples,
                    std::uint32_t guesses, std::uint32_t base_size,
                    const std::string& out, std::uint64_t seed) {
    report rep("reconstruct", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("d", std::uint64_t(d_exp));
    rep.config("samples", samples);
    rep.config("guesses", std::uint64_t(guesses));
    rep.config("base_size", std::uint64_t(base_size));
    auto ipow = [](std::uint64_t b, std::uint32_t e) {
        std::uint64_t v = 1;
        while (e--) v *= b;
        return v;
    };
    const std::uint32_t l = static_cast<std::uint32_t>(ipow(n, d_exp));
    const design_matrix a = make_design(n, l, n);
    rng r(seed);
    const circuit c = random_circuit(l, base_size, r);
    const truth_table h(n);  // all-zero hard-function stand-in for the demo game
    const nw_generator gen{c, a};
    std::vector<std::vector<std::uint64_t>> schedules;
    for (std::uint32_t j = 0; j < 2; ++j) {
        std::vector<std::uint64_t> sched;
        for (std::uint32_t t = 0; t < 2; ++t)
            sched.push_back(r.next_below(a.num_rows()));
        schedules.push_back(sched);
    }
    auto family = std::make_shared<fixed_candidate_family>(schedules);
    trace_thresholds th;
    th.tolerance = 0.35;
    const double default_rate = 1.0 - 3.0 / (double(n) * n * n);
    const auto found = find_frequent_trace(gen, *family, h, samples, th, seed ^ 0x33);
    rep.note("success_rate_default=" + std::to_string(default_rate));
    rep.note("success_rate_required=" + std::to_string(found.required_rate));
    rep.csv() << "guess,branch,trace_len,maj,advantage,ci_lo,ci_hi,kind\n";
    if (!found.ok) {
        rep.note("status=distribution-failure");
        rep.note("best_rate=" + std::to_string(found.best_rate));
        return rep.finish(out);
    }
    oracle target = oracle::from_circuit(c);
    const auto sets = std::make_shared<correction_sets>(build_correction_sets(
        a, found.trace.back(), found.off_row, target, h));
    std::uint32_t gid = 0;
    auto run_guess = [&](const trace_guess& g, const char* kind) {
        const predictor p = reconstruct_predictor(family, a, g, sets);
        const auto meas = measure_predictor(
            p, [&c](std::uint64_t u) { return eval(c, u); }, 10'000,
            seed ^ (0x44 + gid));
        rep.csv() << gid << "," << g.branch << "," << g.trace.size() << "," << g.maj
                  << "," << meas.agreement << "," << meas.ci95.lo << ","
                  << meas.ci95.hi << "," << kind << "\n";
        ++gid;
        return meas.agreement;
    };
    const double matched =
        run_guess({found.branch, found.trace, false}, "found") ;
    run_guess({found.branch, found.trace, true}, "found-maj1");
    rng gr(seed ^ 0x55);
    for (std::uint32_t g = 2; g < guesses; ++g) {
        trace_guess wild;
        wild.branch = static_cast<std::uint32_t>(gr.next_below(family->width()));
        wild.trace = {gr.next_below(a.num_rows())};
        wild.maj = gr.next_bit();
        run_guess(wild, "random");
    }
    rep.note("status=ok trace_len=" + std::to_string(found.trace.size()));
    rep.note("trace_frequency=" + std::to_string(found.trace_frequency));
    rep.note("matched_guess_advantage=" + std::to_string(matched));
    return rep.finish(out);
}

int cmd_speedup(std::uint32_t b, std::uint32_t l, std::uint32_t t,
                const std::string& inner, std::uint32_t inner_m,
                std::uint32_t inner_size, std::uint32_t rounds,
                std::uint64_t boost_tests, const std::string& out,
                std::uint64_t seed) {
    report rep("speedup", seed);
    rep.config("b", std::uint64_t(b));
    rep.config("l", std::uint64_t(l));
    rep.config("t", std::uint64_t(t));
    rep.config("inner", inner);
    const design_matrix a = make_design(b, l, b);
    rng r(seed);
    circuit f;
    inner_learner learner;
    if (inner == "exact") {
        f = constant_circuit(l, true);
        learner = lookup_inner_learner();
    } else if (inner == "coin") {
        f = random_circuit(l, 4, r);
        learner = [](const std::vector<std::pair<std::uint64_t, bool>>&,
                     std::uint64_t, rng& rr) { return rr.next_bit(); };
    } else if (inner == "gcsp") {
        f = random_circuit(l, 4, r);
        learner = bfkl_inner_learner(gcsp_distinguisher(b, inner_m, inner_size),
                                     inner_m, b);
        if (t + 1 < inner_m)
            throw parameter_error("speedup: need t >= inner_m - 1 examples");
    } else {
        throw parameter_error("speedup: unknown inner learner " + inner);
    }
    rep.config("target", label(f));
    oracle target = oracle::from_circuit(f);
    speedup_options opts;
    opts.example_count = t;
    rep.csv() << "round,bundle_size,bundle_cap,challenge_row,advantage,ci_lo,ci_hi\n";
    std::vector<predictor> candidates;
    for (std::uint32_t k = 0; k < rounds; ++k) {
        target.clear_log();
        const auto res = speedup_transform(learner, a, target, opts, seed + 17 * k);
        const auto meas = measure_predictor(
            res.d_prime, [&f](std::uint64_t u) { return eval(f, u); }, 10'000,
            seed ^ (0x66 + k));
        rep.csv() << k << "," << res.bundle_size << "," << res.bundle_cap << ","
                  << res.challenge_row << "," << meas.agreement << ","
                  << meas.ci95.lo << "," << meas.ci95.hi << "\n";
        candidates.push_back(res.d_prime);
    }
    target.clear_log();
    rng br(seed ^ 0x77);
    const auto sel = boost_select(
        candidates, [](const predictor& p, std::uint64_t x) { return p.predict(x); },
        target, l, boost_tests, br);
    tally final_adv;
    rng fr(seed ^ 0x88);
    for (std::uint64_t q = 0; q < 10'000; ++q) {
        const std::uint64_t u = fr.next_bits(l);
        final_adv.add(candidates[sel.winner_index].predict(u) == eval(f, u));
    }
    rep.note("boosted_advantage=" + std::to_string(final_adv.mean()));
    rep.note("boosted_ci_lo=" + std::to_string(final_adv.ci95().lo));
    return rep.finish(out);
}

int cmd_instance_predict(std::uint32_t n, const std::string& samples_text,
                         std::uint32_t size, std::uint64_t y,
                         const std::string& out, std::uint64_t seed) {
    report rep("instance-predict", seed);
    rep.config("n", std::uint64_t(n));
    rep.config("samples", samples_text);
    rep.config("size", std::uint64_t(size));
    rep.config("y", y);
    const sample_list samples(n, parse_samples(samples_text));
    const auto res = instance_predict(samples, size, y);
    rep.csv() << "verdict,minimal_size,witness\n";
    rep.csv() << instance_verdict_name(res.verdict) << ","
              << (res.minimal_size ? std::to_string(*res.minimal_size) : "") << ",\""
              << (res.witness ? label(*res.witness) : "") << "\"\n";
    rep.note(std::string("verdict=") + instance_verdict_name(res.verdict));
    if (res.minimal_size) rep.note("minimal_size=" + std::to_string(*res.minimal_size));
    return rep.finish(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"circuitlab: desk-scale experiments connecting circuit lower "
                 "bounds, generators, games, and learners"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value config file ([subcommand] sections); flags override it");
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "master seed (reports are byte-stable per seed)");

    // design
    auto* design = app.add_subcommand("design", "build an NW design; CSV: row,cells");
    std::uint32_t d_b = 3, d_l = 3, d_deg = 1;
    std::string d_out, d_dump;
    design->add_option("--b", d_b, "log2 of the row count");
    design->add_option("--l", d_l, "set size per row");
    design->add_option("--deg", d_deg, "pairwise intersection bound");
    design->add_option("--out", d_out, "CSV path");
    design->add_option("--dump", d_dump, "also write the plain dump format here");

    // gcsp
    auto* gc = app.add_subcommand("gcsp",
                                  "decide consistency of samples with a small "
                                  "circuit; CSV: y,b");
    std::uint32_t g_n = 2, g_size = 1;
    std::string g_samples = "0=0,1=0,2=0,3=1", g_out;
    std::uint64_t g_budget = default_enumeration_budget;
    gc->add_option("--n", g_n, "input bits");
    gc->add_option("--size", g_size, "circuit size bound");
    gc->add_option("--samples", g_samples, "comma list y=b");
    gc->add_option("--budget", g_budget, "enumeration cap");
    gc->add_option("--out", g_out, "CSV path");

    // bfkl
    auto* bf = app.add_subcommand("bfkl",
                                  "hybrid next-bit predictor on the canonical toy "
                                  "instance; CSV: stage,hybrid_pr,gap,stage_correct");
    std::uint32_t b_n = 1, b_m = 1;
    bool b_exact = false;
    std::uint64_t b_samples = 10'000;
    std::string b_out;
    bf->add_option("--n", b_n, "input bits");
    bf->add_option("--m", b_m, "blocks");
    bf->add_flag("--exact", b_exact, "full enumeration instead of sampling");
    bf->add_option("--samples", b_samples, "per-predictor sample count (mc mode)");
    bf->add_option("--out", b_out, "CSV path");

    // natural-learn
    auto* nl = app.add_subcommand("natural-learn",
                                  "learner from the exhaustive GCSP decider; CSV: "
                                  "one summary row");
    std::uint32_t nl_n = 2, nl_c = 1, nl_d = 3;
    std::uint64_t nl_boost = 2000, nl_points = 10'000;
    std::string nl_target, nl_out;
    nl->add_option("--n", nl_n, "input bits");
    nl->add_option("--c", nl_c, "target size exponent");
    nl->add_option("--d", nl_d, "block exponent (m = n^d), needs d > c+1");
    nl->add_option("--target", nl_target, "target circuit file (default random)");
    nl->add_option("--boost-tests", nl_boost, "boost test queries");
    nl->add_option("--points", nl_points, "advantage measurement points");
    nl->add_option("--out", nl_out, "CSV path");

    // dichotomy
    auto* di = app.add_subcommand("dichotomy",
                                  "learner-or-PRF split over circuit families; "
                                  "CSV: row,col,entry plus verdict");
    std::uint32_t di_n = 2, di_c = 1, di_s = 2, di_m = 2, di_rowsize = 1,
                  di_cols = 12, di_colsize = 4;
    std::string di_out;
    di->add_option("--n", di_n, "row circuit input bits");
    di->add_option("--c", di_c, "row size exponent");
    di->add_option("--s", di_s, "safety size");
    di->add_option("--m", di_m, "blocks");
    di->add_option("--row-size", di_rowsize, "enumerate all rows up to this size");
    di->add_option("--cols", di_cols, "sampled distinguisher count");
    di->add_option("--col-size", di_colsize, "sampled distinguisher size");
    di->add_option("--out", di_out, "CSV path");

    // anticheckers
    auto* ac = app.add_subcommand("anticheckers",
                                  "input multiset every small circuit errs on; "
                                  "CSV: index,point");
    std::uint32_t ac_n = 4, ac_t = 1, ac_count = 2000, ac_hs = 1, ac_trials = 20000;
    double ac_gamma = 0.75;
    std::string ac_out, ac_hfile, ac_hout;
    ac->add_option("--n", ac_n, "input bits");
    ac->add_option("--t", ac_t, "circuit size bound");
    ac->add_option("--count", ac_count, "multiset size");
    ac->add_option("--hard-size", ac_hs, "hardness proxy size for H");
    ac->add_option("--hard-gamma", ac_gamma, "hardness approximation fraction");
    ac->add_option("--trials", ac_trials, "hard-function sampling trials");
    ac->add_option("--h-file", ac_hfile, "read H from a truth table file");
    ac->add_option("--h-out", ac_hout, "write the chosen H as a truth table file");
    ac->add_option("--out", ac_out, "CSV path");

    // witness
    auto* wi = app.add_subcommand("witness",
                                  "single-round witnessing from a holdout "
                                  "learner; CSV: branch,successes,sessions,rate,"
                                  "ci_lo,ci_hi");
    std::uint32_t wi_n = 4, wi_dsize = 4, wi_count = 200, wi_holdout = 1,
                  wi_trials = 20000;
    std::string wi_out, wi_tracelog;
    wi->add_option("--n", wi_n, "input bits");
    wi->add_option("--d-size", wi_dsize, "sampled circuit size");
    wi->add_option("--count", wi_count, "sampled circuit count");
    wi->add_option("--holdout", wi_holdout, "held-out points of the learner");
    wi->add_option("--trials", wi_trials, "hard-function sampling trials");
    wi->add_option("--trace-log", wi_tracelog, "write per-round trace logs here");
    wi->add_option("--out", wi_out, "CSV path");

    // reconstruct
    auto* re = app.add_subcommand("reconstruct",
                                  "frequent-trace reconstruction demo; CSV: guess,"
                                  "branch,trace_len,maj,advantage,ci_lo,ci_hi,kind");
    std::uint32_t re_n = 3, re_d = 2, re_guesses = 6, re_base = 3;
    std::uint64_t re_samples = 3000;
    std::string re_out;
    re->add_option("--n", re_n, "protocol input bits (design rows = 2^n)");
    re->add_option("--d", re_d, "base arity exponent (l = n^d)");
    re->add_option("--samples", re_samples, "seed samples for the trace search");
    re->add_option("--guesses", re_guesses, "guesses to evaluate");
    re->add_option("--base-size", re_base, "random base circuit size");
    re->add_option("--out", re_out, "CSV path");

    // speedup
    auto* sp = app.add_subcommand("speedup",
                                  "query-bundling transform; CSV: round,bundle_size,"
                                  "bundle_cap,challenge_row,advantage,ci_lo,ci_hi");
    std::uint32_t sp_b = 4, sp_l = 4, sp_t = 1, sp_im = 3, sp_is = 2, sp_rounds = 4;
    std::uint64_t sp_boost = 2000;
    std::string sp_inner = "exact", sp_out;
    sp->add_option("--b", sp_b, "log2 design rows");
    sp->add_option("--l", sp_l, "base circuit arity");
    sp->add_option("--t", sp_t, "bundled example count");
    sp->add_option("--inner", sp_inner, "inner learner: exact | coin | gcsp");
    sp->add_option("--inner-m", sp_im, "gcsp inner blocks");
    sp->add_option("--inner-size", sp_is, "gcsp inner size bound");
    sp->add_option("--rounds", sp_rounds, "transform repetitions to boost over");
    sp->add_option("--boost-tests", sp_boost, "boost test queries");
    sp->add_option("--out", sp_out, "CSV path");

    // instance-predict
    auto* ip = app.add_subcommand("instance-predict",
                                  "minimal-consistent-circuit prediction; CSV: "
                                  "verdict,minimal_size,witness");
    std::uint32_t ip_n = 2, ip_size = 1;
    std::uint64_t ip_y = 0;
    std::string ip_samples = "1=0,2=0,3=1", ip_out;
    ip->add_option("--n", ip_n, "input bits");
    ip->add_option("--samples", ip_samples, "comma list y=b");
    ip->add_option("--size", ip_size, "size bound");
    ip->add_option("--y", ip_y, "fresh point to predict");
    ip->add_option("--out", ip_out, "CSV path");

    for (CLI::App* sub : {design, gc, bf, nl, di, ac, wi, re, sp, ip})
        sub->add_option("--seed", seed, "master seed (reports are byte-stable per seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (design->parsed())
            return cmd_design(d_b, d_l, d_deg,
                              d_out.empty() ? default_out("design") : d_out, d_dump,
                              seed);
        if (gc->parsed())
            return cmd_gcsp(g_n, g_size, g_samples, g_budget,
                            g_out.empty() ? default_out("gcsp") : g_out, seed);
        if (bf->parsed())
            return cmd_bfkl(b_n, b_m, b_exact, b_samples,
                            b_out.empty() ? default_out("bfkl") : b_out, seed);
        if (nl->parsed())
            return cmd_natural_learn(nl_n, nl_c, nl_d, nl_target, nl_boost, nl_points,
                                     nl_out.empty() ? default_out("natural-learn")
                                                    : nl_out,
                                     seed);
        if (di->parsed())
            return cmd_dichotomy(di_n, di_c, di_s, di_m, di_rowsize, di_cols,
                                 di_colsize,
                                 di_out.empty() ? default_out("dichotomy") : di_out,
                                 seed);
        if (ac->parsed())
            return cmd_anticheckers(ac_n, ac_t, ac_count, ac_hs, ac_gamma, ac_trials,
                                    ac_hfile, ac_hout,
                                    ac_out.empty() ? default_out("anticheckers")
                                                   : ac_out,
                                    seed);
        if (wi->parsed())
            return cmd_witness(wi_n, wi_dsize, wi_count, wi_holdout, wi_trials,
                               wi_tracelog,
                               wi_out.empty() ? default_out("witness") : wi_out, seed);
        if (re->parsed())
            return cmd_reconstruct(re_n, re_d, re_samples, re_guesses, re_base,
                                   re_out.empty() ? default_out("reconstruct")
                                                  : re_out,
                                   seed);
        if (sp->parsed())
            return cmd_speedup(sp_b, sp_l, sp_t, sp_inner, sp_im, sp_is, sp_rounds,
                               sp_boost,
                               sp_out.empty() ? default_out("speedup") : sp_out, seed);
        if (ip->parsed())
            return cmd_instance_predict(ip_n, ip_samples, ip_size, ip_y,
                                        ip_out.empty() ? default_out("instance-predict")
                                                       : ip_out,
                                        seed);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const budget_error& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const pipeline_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const sparsification_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const not_found_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const degenerate_game_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const protocol_violation& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const parameter_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const structural_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
