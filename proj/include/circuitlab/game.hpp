#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "circuitlab/errors.hpp"
#include "circuitlab/gcsp.hpp"
#include "circuitlab/generator.hpp"
#include "circuitlab/learning.hpp"
#include "circuitlab/rng.hpp"

namespace circuitlab {

// ---------------------------------------------------------------------------
// Two-player zero-sum games. MIN owns the rows and pays the entry to MAX,
// who owns the columns.
// ---------------------------------------------------------------------------

struct game_matrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<double> entries;  // row-major
    std::string provenance;

    std::size_t rows() const { return row_labels.size(); }
    std::size_t cols() const { return col_labels.size(); }
    double at(std::size_t i, std::size_t j) const { return entries[i * cols() + j]; }
    double& at(std::size_t i, std::size_t j) { return entries[i * cols() + j]; }

    double min_entry() const {
        return *std::min_element(entries.begin(), entries.end());
    }
    double max_entry() const {
        return *std::max_element(entries.begin(), entries.end());
    }

    void check() const {
        if (rows() == 0 || cols() == 0 || entries.size() != rows() * cols())
            throw structural_error("game_matrix: not rectangular");
        for (double e : entries)
            if (!std::isfinite(e)) throw structural_error("game_matrix: non-finite entry");
    }

    std::string to_csv() const {
        std::ostringstream out;
        out << "row,col,entry\n";
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j)
                out << '"' << row_labels[i] << "\",\"" << col_labels[j] << "\","
                    << at(i, j) << "\n";
        return out.str();
    }
};

struct mixed_strategy {
    enum class side_t { min_rows, max_cols };
    side_t side;
    std::vector<double> weights;
    std::optional<std::vector<std::uint32_t>> multiset;  // k-uniform backing

    void check() const {
        double sum = 0;
        for (double w : weights) {
            if (w < -1e-12) throw structural_error("mixed_strategy: negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw structural_error("mixed_strategy: weights do not sum to 1");
        if (multiset) {
            const double k = static_cast<double>(multiset->size());
            for (double w : weights) {
                const double scaled = w * k;
                if (std::abs(scaled - std::round(scaled)) > 1e-9)
                    throw structural_error("mixed_strategy: not k-uniform");
            }
        }
    }

    static mixed_strategy k_uniform(side_t side, std::vector<std::uint32_t> members,
                                    std::size_t universe) {
        mixed_strategy s;
        s.side = side;
        s.weights.assign(universe, 0.0);
        for (std::uint32_t idx : members)
            s.weights[idx] += 1.0 / static_cast<double>(members.size());
        s.multiset = std::move(members);
        return s;
    }
};

// Expected payoff when MIN plays `p` and MAX plays pure column j.
inline double payoff_vs_col(const game_matrix& m, const std::vector<double>& p,
                            std::size_t j) {
    double s = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += p[i] * m.at(i, j);
    return s;
}

// Expected payoff when MAX plays `q` and MIN plays pure row i.
inline double payoff_vs_row(const game_matrix& m, const std::vector<double>& q,
                            std::size_t i) {
    double s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += q[j] * m.at(i, j);
    return s;
}

struct game_value {
    double v;
    mixed_strategy min_strategy;
    mixed_strategy max_strategy;
    std::string method;
    std::uint64_t iterations = 0;  // 0 for exact
    double eta = 0.0;

    // Worst-case payoffs of the certificates.
    double min_certificate_worst(const game_matrix& m) const {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.cols(); ++j)
            worst = std::max(worst, payoff_vs_col(m, min_strategy.weights, j));
        return worst;
    }
    double max_certificate_worst(const game_matrix& m) const {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.rows(); ++i)
            worst = std::min(worst, payoff_vs_row(m, max_strategy.weights, i));
        return worst;
    }
};

// ---------------------------------------------------------------------------
// Exact solve. Shift entries positive; with p' = p / v the MIN player's
// problem becomes the standard-form LP
//   max sum(p')  s.t. for every column j:  sum_i M'[i][j] p'_i <= 1
// solved by a dense tableau simplex with Bland's rule. The value is
// 1/sum(p') minus the shift; the MIN strategy is the normalized primal and
// the MAX strategy the normalized duals under the slack columns.
// ---------------------------------------------------------------------------

inline game_value solve_game_exact(const game_matrix& m) {
    m.check();
    const std::size_t r = m.rows(), c = m.cols();
    const double shift = 1.0 - m.min_entry();
    const std::size_t width = r + c + 1;  // r structural vars, c slacks, rhs
    std::vector<std::vector<double>> t(c + 1, std::vector<double>(width, 0.0));
    for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t i = 0; i < r; ++i) t[j][i] = m.at(i, j) + shift;
        t[j][r + j] = 1.0;
        t[j][width - 1] = 1.0;
    }
    for (std::size_t i = 0; i < r; ++i) t[c][i] = -1.0;

    std::vector<std::size_t> basis(c);
    for (std::size_t j = 0; j < c; ++j) basis[j] = r + j;

    const double eps = 1e-12;
    const std::size_t pivot_cap = 200'000;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > pivot_cap) throw error("solve_game_exact: pivot cap exceeded");
        // Bland: entering variable = smallest improving index.
        std::size_t enter = width;
        for (std::size_t k = 0; k + 1 < width; ++k)
            if (t[c][k] < -eps) {
                enter = k;
                break;
            }
        if (enter == width) break;  // optimal
        // Ratio test; ties resolved toward the smallest basis index.
        std::size_t leave = c;
        double best_ratio = 0;
        for (std::size_t row = 0; row < c; ++row) {
            if (t[row][enter] <= eps) continue;
            const double ratio = t[row][width - 1] / t[row][enter];
            if (leave == c || ratio < best_ratio - eps ||
                (ratio < best_ratio + eps && basis[row] < basis[leave])) {
                leave = row;
                best_ratio = ratio;
            }
        }
        if (leave == c) throw error("solve_game_exact: unbounded LP");
        const double piv = t[leave][enter];
        for (std::size_t k = 0; k < width; ++k) t[leave][k] /= piv;
        for (std::size_t row = 0; row <= c; ++row) {
            if (row == leave) continue;
            const double f = t[row][enter];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < width; ++k) t[row][k] -= f * t[leave][k];
        }
        basis[leave] = enter;
    }

    const double total = t[c][width - 1];
    if (total <= 0) throw error("solve_game_exact: degenerate objective");

    std::vector<double> p(r, 0.0), q(c, 0.0);
    for (std::size_t row = 0; row < c; ++row)
        if (basis[row] < r) p[basis[row]] = t[row][width - 1];
    for (std::size_t i = 0; i < r; ++i) p[i] /= total;
    for (std::size_t j = 0; j < c; ++j) q[j] = t[c][r + j] / total;
    // Clean tiny negatives from roundoff and renormalize.
    auto tidy = [](std::vector<double>& w) {
        double s = 0;
        for (double& x : w) {
            if (x < 0) x = 0;
            s += x;
        }
        for (double& x : w) x /= s;
    };
    tidy(p);
    tidy(q);

    game_value gv{1.0 / total - shift,
                  {mixed_strategy::side_t::min_rows, std::move(p), std::nullopt},
                  {mixed_strategy::side_t::max_cols, std::move(q), std::nullopt},
                  "exact",
                  0,
                  0.0};
    return gv;
}

// ---------------------------------------------------------------------------
// Multiplicative-weights approximation. eta = sqrt(ln(rows)/T); T defaults to
// the ln(rows)/eps^2 schedule. Returns averaged strategies whose duality gap
// is at most ~eps (entries assumed in [0,1]-ish range; they are rescaled).
// ---------------------------------------------------------------------------

inline game_value solve_game_mw(const game_matrix& m, double epsilon,
                                std::uint64_t iterations = 0) {
    m.check();
    const std::size_t r = m.rows(), c = m.cols();
    const double lo = m.min_entry(), hi = m.max_entry();
    const double range = (hi - lo) > 0 ? (hi - lo) : 1.0;
    const double logr = std::log(static_cast<double>(std::max<std::size_t>(2, r)));
    const std::uint64_t t_rounds =
        iterations ? iterations
                   : static_cast<std::uint64_t>(std::ceil(logr / (epsilon * epsilon)));
    const double eta = std::sqrt(logr / static_cast<double>(t_rounds));

    std::vector<double> logw(r, 0.0), p(r), pbar(r, 0.0), qbar(c, 0.0);
    for (std::uint64_t round = 0; round < t_rounds; ++round) {
        double mx = *std::max_element(logw.begin(), logw.end());
        double z = 0;
        for (std::size_t i = 0; i < r; ++i) {
            p[i] = std::exp(logw[i] - mx);
            z += p[i];
        }
        for (std::size_t i = 0; i < r; ++i) p[i] /= z;
        // MAX best-responds with a pure column.
        std::size_t best_j = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < c; ++j) {
            const double val = payoff_vs_col(m, p, j);
            if (val > best_val + 1e-15) {
                best_val = val;
                best_j = j;
            }
        }
        for (std::size_t i = 0; i < r; ++i) {
            const double loss = (m.at(i, best_j) - lo) / range;
            logw[i] -= eta * loss;
        }
        for (std::size_t i = 0; i < r; ++i) pbar[i] += p[i];
        qbar[best_j] += 1.0;
    }
    for (auto& x : pbar) x /= static_cast<double>(t_rounds);
    for (auto& x : qbar) x /= static_cast<double>(t_rounds);

    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j)
        upper = std::max(upper, payoff_vs_col(m, pbar, j));
    double lower = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r; ++i)
        lower = std::min(lower, payoff_vs_row(m, qbar, i));

    game_value gv{(upper + lower) / 2.0,
                  {mixed_strategy::side_t::min_rows, std::move(pbar), std::nullopt},
                  {mixed_strategy::side_t::max_cols, std::move(qbar), std::nullopt},
                  "mw",
                  t_rounds,
                  eta};
    return gv;
}

// ---------------------------------------------------------------------------
// k-uniform sparsification: sample k pure strategies from a (near-)optimal
// mixed strategy and verify the guarantee against every opponent pure
// strategy; retry with a fresh stream on failure.
// ---------------------------------------------------------------------------

inline std::uint32_t k_uniform_count(std::size_t opponent_strategies, double epsilon) {
    const double k =
        std::log(static_cast<double>(opponent_strategies)) / (2.0 * epsilon * epsilon);
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(k)));
}

inline std::vector<std::uint32_t> sample_multiset(const std::vector<double>& weights,
                                                  std::uint32_t k, rng& r) {
    std::vector<double> cumulative(weights.size());
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cumulative[i] = acc;
    }
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::uint32_t t = 0; t < k; ++t) {
        const double u = r.next_double() * acc;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        out.push_back(static_cast<std::uint32_t>(it - cumulative.begin()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline mixed_strategy k_uniform_sparsify(const game_matrix& m,
                                         const mixed_strategy& strategy, double epsilon,
                                         std::uint64_t seed,
                                         std::uint32_t max_retries = 64) {
    m.check();
    strategy.check();
    const bool min_side = strategy.side == mixed_strategy::side_t::min_rows;
    const std::size_t opponents = min_side ? m.cols() : m.rows();
    const std::uint32_t k = k_uniform_count(opponents, epsilon);
    const double v = solve_game_exact(m).v;
    const double slack = epsilon * (m.max_entry() - m.min_entry());

    rng master(seed);
    std::size_t worst = 0;
    for (std::uint32_t attempt = 0; attempt < max_retries; ++attempt) {
        rng r = master.derive(attempt);
        auto members = sample_multiset(strategy.weights, k, r);
        mixed_strategy cand = mixed_strategy::k_uniform(
            strategy.side, members, min_side ? m.rows() : m.cols());
        bool ok = true;
        for (std::size_t o = 0; o < opponents && ok; ++o) {
            const double pay = min_side ? payoff_vs_col(m, cand.weights, o)
                                        : payoff_vs_row(m, cand.weights, o);
            const bool bad = min_side ? pay > v + slack + 1e-12 : pay < v - slack - 1e-12;
            if (bad) {
                ok = false;
                worst = o;
            }
        }
        if (ok) return cand;
    }
    throw sparsification_error("k_uniform_sparsify: retries exhausted", worst);
}

// ---------------------------------------------------------------------------
// Dichotomy game M_{C,D} = |Pr[D(x)=1] - Pr[D(G_C(x))=1]| and the
// learner-or-PRF split at v(M) vs 1/4s.
// ---------------------------------------------------------------------------

inline game_matrix build_game(const std::vector<circuit>& row_circuits,
                              const std::vector<circuit>& col_distinguishers,
                              std::uint32_t blocks, estimate_mode mode,
                              mc_options mc = {}, std::uint64_t budget = 1ull << 28) {
    if (row_circuits.empty() || col_distinguishers.empty())
        throw structural_error("build_game: empty family");
    game_matrix m;
    m.provenance = "dichotomy |Pr[D]-Pr[D(G_C)]|";
    for (const auto& c : row_circuits) m.row_labels.push_back(label(c));
    for (const auto& d : col_distinguishers) m.col_labels.push_back(label(d));
    m.entries.resize(row_circuits.size() * col_distinguishers.size());
    for (std::size_t j = 0; j < col_distinguishers.size(); ++j) {
        const auto d = distinguisher::from_circuit(col_distinguishers[j]);
        for (std::size_t i = 0; i < row_circuits.size(); ++i) {
            mc_options cell = mc;
            cell.seed = mc.seed + i * 0x9e37u + j;
            const auto rep =
                distinguishing_advantage(d, row_circuits[i], blocks, mode, cell, budget);
            m.at(i, j) = std::abs(rep.value);
        }
    }
    return m;
}

enum class dichotomy_branch { learner, prf };

struct dichotomy_options {
    std::uint32_t blocks = 2;        // m
    std::uint32_t safety = 2;        // s
    std::uint32_t c_exp = 1;         // target circuits have size <= n^c_exp
    estimate_mode mode = estimate_mode::exact;
    mc_options mc = {};
    std::uint32_t sparsify_retries = 64;
    std::uint64_t budget = 1ull << 28;
};

struct dichotomy_result {
    dichotomy_branch branch;
    double v;
    std::uint32_t k;
    std::vector<std::uint32_t> multiset;  // column indices (learner) or row indices (prf)
    double certificate_bound;  // min avg advantage over rows, or max avg gap over cols
    game_matrix matrix;
    std::vector<circuit> row_family;  // deduplicated by computed function
    std::vector<circuit> col_family;
    std::optional<succinct_prf> prf;
    std::string verdict_line;
};

// Keep the first circuit in input order per distinct truth table. The game
// payoff only depends on the function, so this is payoff-preserving and
// matches the function-count bounds the multiset sizes come from.
inline std::vector<circuit> dedupe_by_function(const std::vector<circuit>& circuits) {
    std::vector<circuit> out;
    std::vector<truth_table> seen;
    for (const auto& c : circuits) {
        const truth_table t = to_truth_table(c);
        bool dup = false;
        for (const auto& u : seen)
            if (u == t) {
                dup = true;
                break;
            }
        if (!dup) {
            seen.push_back(t);
            out.push_back(c);
        }
    }
    return out;
}

inline dichotomy_result dichotomy(const std::vector<circuit>& row_circuits,
                                  const std::vector<circuit>& col_distinguishers,
                                  const dichotomy_options& opts, std::uint64_t seed) {
    if (row_circuits.empty() || col_distinguishers.empty())
        throw structural_error("dichotomy: empty family");
    const std::uint32_t n = row_circuits.front().n;
    const double s = static_cast<double>(opts.safety);
    auto ipow = [](double b, std::uint32_t e) {
        double v = 1;
        while (e--) v *= b;
        return v;
    };
    const std::vector<circuit> rows_dd = dedupe_by_function(row_circuits);
    const std::vector<circuit> cols_dd = dedupe_by_function(col_distinguishers);
    // Asymptotic-regime caps on the multiset sizes; reject configurations whose
    // families are too large for them.
    const double learner_cap = 32.0 * ipow(n, opts.c_exp + 1) * s * s;
    const double prf_cap = 8.0 * s * s * s * s;
    const double eps_learner = 1.0 / (8.0 * s);
    const double eps_prf = 1.0 / (4.0 * s);
    if (k_uniform_count(rows_dd.size(), eps_learner) > learner_cap)
        throw parameter_error("dichotomy: row family too large for k <= 32 n^{c+1} s^2");
    if (k_uniform_count(cols_dd.size(), eps_prf) > prf_cap)
        throw parameter_error("dichotomy: column family too large for k <= 8 s^4");

    game_matrix m =
        build_game(rows_dd, cols_dd, opts.blocks, opts.mode, opts.mc, opts.budget);
    const game_value gv = solve_game_exact(m);
    const double threshold = 1.0 / (4.0 * s);

    dichotomy_result res;
    res.v = gv.v;
    res.matrix = m;
    res.row_family = rows_dd;
    res.col_family = cols_dd;

    rng master(seed);
    if (gv.v >= threshold) {
        res.branch = dichotomy_branch::learner;
        const std::uint32_t k = k_uniform_count(m.rows(), eps_learner);
        // Scan directly against the 1/8s guarantee the learner needs.
        std::size_t worst = 0;
        bool done = false;
        for (std::uint32_t attempt = 0; attempt < opts.sparsify_retries && !done;
             ++attempt) {
            rng r = master.derive(attempt);
            auto members = sample_multiset(gv.max_strategy.weights, k, r);
            double lowest = std::numeric_limits<double>::infinity();
            std::size_t low_row = 0;
            for (std::size_t i = 0; i < m.rows(); ++i) {
                double avg = 0;
                for (auto j : members) avg += m.at(i, j);
                avg /= static_cast<double>(members.size());
                if (avg < lowest) {
                    lowest = avg;
                    low_row = i;
                }
            }
            if (lowest >= 1.0 / (8.0 * s) - 1e-12) {
                res.multiset = std::move(members);
                res.certificate_bound = lowest;
                done = true;
            } else {
                worst = low_row;
            }
        }
        if (!done)
            throw sparsification_error("dichotomy: learner certificate scan failed", worst);
        res.k = static_cast<std::uint32_t>(res.multiset.size());
    } else {
        res.branch = dichotomy_branch::prf;
        const std::uint32_t k = k_uniform_count(m.cols(), eps_prf);
        std::size_t worst = 0;
        bool done = false;
        for (std::uint32_t attempt = 0; attempt < opts.sparsify_retries && !done;
             ++attempt) {
            rng r = master.derive(attempt);
            auto members = sample_multiset(gv.min_strategy.weights, k, r);
            double highest = -std::numeric_limits<double>::infinity();
            std::size_t high_col = 0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                double avg = 0;
                for (auto i : members) avg += m.at(i, j);
                avg /= static_cast<double>(members.size());
                if (avg > highest) {
                    highest = avg;
                    high_col = j;
                }
            }
            if (highest <= 1.0 / (2.0 * s) + 1e-12) {
                res.multiset = std::move(members);
                res.certificate_bound = highest;
                done = true;
            } else {
                worst = high_col;
            }
        }
        if (!done)
            throw sparsification_error("dichotomy: prf certificate scan failed", worst);
        res.k = static_cast<std::uint32_t>(res.multiset.size());
        succinct_prf prf;
        prf.blocks = opts.blocks;
        prf.safety_size = s;
        for (auto i : res.multiset) prf.members.push_back(rows_dd[i]);
        res.prf = std::move(prf);
    }
    std::ostringstream verdict;
    verdict << "BRANCH=" << (res.branch == dichotomy_branch::learner ? "LEARNER" : "PRF")
            << " k=" << res.k << " v=" << res.v;
    res.verdict_line = verdict.str();
    return res;
}

// Wraps a learner-branch result as the randomized predictor it promises: a
// seeded pick from the distinguisher multiset feeds the hybrid next-bit rule.
inline predictor dichotomy_learner(const dichotomy_result& res, oracle& target,
                                   std::uint64_t seed) {
    if (res.branch != dichotomy_branch::learner)
        throw parameter_error("dichotomy_learner: result is on the PRF branch");
    rng r(seed);
    const circuit& chosen =
        res.col_family[res.multiset[r.next_below(res.multiset.size())]];
    const std::uint32_t n = res.row_family.front().n;
    const std::uint32_t blocks =
        static_cast<std::uint32_t>(chosen.n / (n + 1));
    return make_bfkl_predictor(distinguisher::from_circuit(chosen), blocks, n, target,
                               r.next_u64());
}

// ---------------------------------------------------------------------------
// Anticheckers: a small input multiset on which every small circuit errs on
// close to a v(M) fraction of positions, from the MAX side of the game
// rows = functions of size <= t, cols = inputs, payoff [C(x) != H(x)].
// ---------------------------------------------------------------------------

struct antichecker_result {
    std::vector<std::uint64_t> multiset;  // input points, with multiplicity
    double v;                             // exact game value
    double epsilon;                       // sampling slack for this count
    double floor;                         // min over functions of error rate on multiset
    std::size_t distinct_functions;
};

inline antichecker_result find_anticheckers(const truth_table& h, std::uint32_t t,
                                            std::uint32_t count, std::uint64_t seed,
                                            std::uint32_t max_retries = 64,
                                            std::uint64_t budget = default_enumeration_budget) {
    // Distinct truth tables realized at size <= t; payoffs only depend on the
    // function, so duplicates would just repeat rows.
    std::vector<truth_table> functions;
    {
        const bool small_enough = h.inputs() <= 4;
        std::vector<bool> seen;
        if (small_enough) seen.assign(std::size_t(1) << h.num_points(), false);
        circuit_enumerator en(h.inputs(), t, budget);
        while (auto c = en.next()) {
            truth_table tt = to_truth_table(*c);
            if (tt == h)
                throw degenerate_game_error("anticheckers: H computable at size " +
                                            std::to_string(t));
            if (small_enough) {
                const auto key = static_cast<std::size_t>(tt.bits().to_uint());
                if (seen[key]) continue;
                seen[key] = true;
                functions.push_back(std::move(tt));
            } else {
                bool dup = false;
                for (const auto& f : functions)
                    if (f == tt) {
                        dup = true;
                        break;
                    }
                if (!dup) functions.push_back(std::move(tt));
            }
        }
    }
    const std::uint64_t points = h.num_points();
    game_matrix m;
    m.provenance = "anticheckers [C(x)!=H(x)]";
    for (std::size_t i = 0; i < functions.size(); ++i)
        m.row_labels.push_back("f" + std::to_string(i));
    for (std::uint64_t x = 0; x < points; ++x)
        m.col_labels.push_back("x" + std::to_string(x));
    m.entries.resize(functions.size() * points);
    for (std::size_t i = 0; i < functions.size(); ++i)
        for (std::uint64_t x = 0; x < points; ++x)
            m.at(i, x) = functions[i].get(x) != h.get(x) ? 1.0 : 0.0;

    const game_value gv = solve_game_exact(m);
    const double eps = std::sqrt(std::log(static_cast<double>(functions.size())) /
                                 (2.0 * static_cast<double>(count)));

    rng master(seed);
    for (std::uint32_t attempt = 0; attempt < max_retries; ++attempt) {
        rng r = master.derive(attempt);
        const auto members = sample_multiset(gv.max_strategy.weights, count, r);
        double floor = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < functions.size(); ++i) {
            double err = 0;
            for (auto x : members) err += m.at(i, x);
            floor = std::min(floor, err / static_cast<double>(count));
        }
        if (floor >= gv.v - eps - 1e-12) {
            antichecker_result res;
            res.v = gv.v;
            res.epsilon = eps;
            res.floor = floor;
            res.distinct_functions = functions.size();
            for (auto x : members) res.multiset.push_back(x);
            return res;
        }
    }
    throw sparsification_error("anticheckers: retries exhausted", 0);
}

}  // namespace circuitlab
