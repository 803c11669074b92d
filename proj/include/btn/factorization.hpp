/*
 * Copyright 2026 The btn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "btn/nnsvd.hpp"
#include "btn/solvers.hpp"

namespace btn {

/// Memo of already-solved problems, keyed by the canonical QUBO text.
/// Solutions are stored at the problem's full variable count (including
/// auxiliaries).
class QuboCache {
public:
    const BitVec* find(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void insert(const std::string& key, BitVec solution) {
        entries_.emplace(key, std::move(solution));
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, BitVec> entries_;
};

/// Everything the factorization layer needs to run QUBOs: the backend, the
/// packing capacity, the read budget, the shared solution cache, and the
/// running accounting of solver-internal time.
struct SolveContext {
    const QuboSolver* solver = nullptr;
    QuboCache* cache = nullptr; // may be null: no memoization
    int num_reads = 100;
    int sweeps = 1000;
    std::size_t capacity = 255;

    double solver_time_s = 0.0;        // accumulated across calls
    std::size_t problems_submitted = 0; // problems actually sent to the backend
    std::vector<std::string>* qubo_log = nullptr; // canonical text of each solved QUBO
};

/// One column-factorization pass: returns B with one column per column of M,
/// where column i minimizes the Hamming distance between M_i and A*y over
/// y in {0,1}^rank. Per column the Hamming polynomial is built, quadratized
/// with the default penalty, and then either answered with a seeded random
/// bitstring (all-zero problem), served from the cache, or solved by the
/// backend; cache-missing columns are deduplicated and solved as one packed
/// batch. The i-th result column is the solution restricted to the rank
/// original variables.
inline BooleanMatrix column_factorization(const BooleanMatrix& m, const BooleanMatrix& a,
                                          SolveContext& ctx, std::uint64_t seed) {
    if (a.rows() != m.rows())
        throw ShapeError("column_factorization: fixed factor is " + a.shape_string() +
                         " but matrix is " + m.shape_string());
    const std::size_t rank = a.cols();

    struct PendingColumn {
        std::size_t column;
        std::size_t problem; // index into batch
    };
    std::vector<Qubo> batch;
    std::vector<std::string> batch_keys;
    std::unordered_map<std::string, std::size_t> batch_index;
    std::vector<PendingColumn> pending;
    BooleanMatrix b(rank, m.cols());

    auto assign_column = [&](std::size_t j, const BitVec& full) {
        for (std::size_t l = 0; l < rank; ++l) b.set(l, j, full.get(l));
    };

    for (std::size_t j = 0; j < m.cols(); ++j) {
        const BitVec col = matrix_column(m, j);
        const Hubo h = build_column_hubo(a, col);
        if (h.is_constant()) {
            // Nothing to optimize: every assignment scores the same.
            Rng rng(mix_seed(seed, 0xE0, j));
            assign_column(j, detail::random_bits(rng, rank));
            continue;
        }
        Qubo q = hubo_to_qubo(h, default_strength(h));
        std::string key = canonical_json(q);
        if (ctx.cache) {
            if (const BitVec* hit = ctx.cache->find(key)) {
                assign_column(j, *hit);
                continue;
            }
        }
        auto it = batch_index.find(key);
        std::size_t problem;
        if (it == batch_index.end()) {
            problem = batch.size();
            batch_index.emplace(key, problem);
            batch.push_back(std::move(q));
            batch_keys.push_back(std::move(key));
        } else {
            problem = it->second;
        }
        pending.push_back({j, problem});
    }

    if (!batch.empty()) {
        SolveRequest req;
        req.problems = batch;
        req.num_reads = ctx.num_reads;
        req.seed = mix_seed(seed, 0x50);
        req.sweeps = ctx.sweeps;
        const SolveResult solved = pack_and_solve(req, *ctx.solver, ctx.capacity);
        ctx.problems_submitted += batch.size();
        for (std::size_t p = 0; p < batch.size(); ++p) {
            ctx.solver_time_s += solved.problems[p].solve_time_s;
            if (ctx.cache) ctx.cache->insert(batch_keys[p], solved.problems[p].best_bits);
            if (ctx.qubo_log) ctx.qubo_log->push_back(batch_keys[p]);
        }
        for (const PendingColumn& pc : pending)
            assign_column(pc.column, solved.problems[pc.problem].best_bits);
    }
    return b;
}

/// Gives a context a solution cache when the caller did not share one, and
/// syncs the accounting fields back when the scope ends. Used both by a
/// single factorization (memo scoped to the call) and by the decomposition
/// drivers (memo shared across all factorizations of one decomposition).
class ScopedCache {
public:
    explicit ScopedCache(SolveContext& ctx) : ctx_(ctx), use_(ctx) {
        if (!use_.cache) use_.cache = &cache_;
    }
    ~ScopedCache() {
        ctx_.solver_time_s = use_.solver_time_s;
        ctx_.problems_submitted = use_.problems_submitted;
    }
    ScopedCache(const ScopedCache&) = delete;
    ScopedCache& operator=(const ScopedCache&) = delete;

    SolveContext& context() { return use_; }

private:
    SolveContext& ctx_;
    SolveContext use_;
    QuboCache cache_;
};

struct FactorizationResult {
    BooleanMatrix a, b;
    std::size_t rank = 0;
    std::vector<std::size_t> hamming_history; // one entry per alternating iteration
    bool exact = false;
    double qubo_solver_time_s = 0.0;
};

struct FactorizationParams {
    int n_states = 20; // random restarts
    int rand_dur = 2;  // iteration budget per random restart
    int l_c = 10;      // repeated-minima window
    int l_h = 100;     // hard iteration cap
    std::uint64_t seed = 0;
};

/// Alternates B <- column_factorization(M, A) and A <- column_factorization(
/// M^T, B^T)^T. Stops on an exact factorization, when the running minimum
/// Hamming value has repeated l_c times consecutively (the stuck-in-a-local-
/// minimum signal), or after l_h iterations; returns the minimum-error pair
/// seen, the initial pair included.
inline FactorizationResult iterative_matrix_factorization(const BooleanMatrix& m,
                                                          const BooleanMatrix& a0,
                                                          const BooleanMatrix& b0, int l_c,
                                                          int l_h, SolveContext& ctx,
                                                          std::uint64_t seed) {
    if (a0.rows() != m.rows() || b0.cols() != m.cols() || a0.cols() != b0.rows())
        throw ShapeError("iterative_matrix_factorization: initial factors " +
                         a0.shape_string() + " * " + b0.shape_string() +
                         " do not match matrix " + m.shape_string());

    const double time_start = ctx.solver_time_s;
    FactorizationResult best;
    best.a = a0;
    best.b = b0;
    best.rank = a0.cols();

    std::size_t best_h = hamming(m, bool_matmul(a0, b0));
    auto consider = [&](const BooleanMatrix& a, const BooleanMatrix& b, std::size_t h) {
        if (h < best_h) {
            best_h = h;
            best.a = a;
            best.b = b;
        }
    };

    auto finish = [&]() -> FactorizationResult& {
        best.exact = best_h == 0;
        best.qubo_solver_time_s = ctx.solver_time_s - time_start;
        return best;
    };

    if (best_h == 0) return finish(); // already factored, zero iterations

    BooleanMatrix a = a0, b = b0;
    std::size_t current_min = std::numeric_limits<std::size_t>::max();
    int repeats = 0;

    for (int iter = 1; iter <= l_h; ++iter) {
        b = column_factorization(m, a, ctx, mix_seed(seed, iter, 0));
        std::size_t h = hamming(m, bool_matmul(a, b));
        consider(a, b, h);
        if (h == 0) {
            best.hamming_history.push_back(0);
            return finish();
        }

        a = transpose(column_factorization(transpose(m), transpose(b), ctx,
                                           mix_seed(seed, iter, 1)));
        h = hamming(m, bool_matmul(a, b));
        consider(a, b, h);
        best.hamming_history.push_back(h);
        if (h == 0) return finish();

        if (h < current_min) {
            current_min = h;
            repeats = 1;
        } else if (h == current_min) {
            ++repeats;
        } else {
            repeats = 0;
        }
        if (repeats >= l_c) break;
    }
    return finish();
}

namespace detail {

/// NNSVD initial factors at an arbitrary target rank: the SVD rank is capped
/// by the smaller matrix dimension and the factors are zero-padded up to the
/// requested inner dimension.
inline std::pair<BooleanMatrix, BooleanMatrix> nnsvd_init(const BooleanMatrix& m,
                                                          std::size_t r) {
    const std::size_t effective = std::min(r, std::min(m.rows(), m.cols()));
    auto [a, b] = boolean_nnsvd(m, effective);
    if (effective == r) return {a, b};
    BooleanMatrix a_pad(m.rows(), r), b_pad(r, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < effective; ++j)
            if (a.get(i, j)) a_pad.set(i, j, true);
    for (std::size_t i = 0; i < effective; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (b.get(i, j)) b_pad.set(i, j, true);
    return {a_pad, b_pad};
}

inline BooleanMatrix random_matrix(std::size_t rows, std::size_t cols, double p, Rng& rng) {
    BooleanMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) m.mutable_data().set(i, rng.bernoulli(p));
    return m;
}

} // namespace detail

/// Full multi-start factorization of M at the given rank:
///   (1) NNSVD-based initialization, iterated with the full budget;
///   (2) on failure, n_states random Bernoulli(p) restarts with the short
///       budget rand_dur, p drawn once per restart from uniform(0.1, 0.9);
///   (3) the best pool member re-iterated with the full budget.
/// Returns the first exact factorization found, otherwise the minimum-error
/// pair across every phase. The Hamming history concatenates all phases in
/// the order they ran.
inline FactorizationResult matrix_factorization(const BooleanMatrix& m, std::size_t rank,
                                                SolveContext& ctx,
                                                const FactorizationParams& params = {}) {
    if (rank == 0) throw ValueError("matrix_factorization: rank must be >= 1");

    // The memo is scoped to this factorization unless the caller shares one.
    ScopedCache scope(ctx);
    SolveContext& use = scope.context();
    const double time_start = use.solver_time_s;

    std::vector<std::size_t> history;
    FactorizationResult best;
    std::size_t best_h = std::numeric_limits<std::size_t>::max();
    bool have_best = false;

    auto consider = [&](FactorizationResult& r) {
        history.insert(history.end(), r.hamming_history.begin(), r.hamming_history.end());
        const std::size_t h = hamming(m, bool_matmul(r.a, r.b));
        if (!have_best || h < best_h) {
            best = r;
            best_h = h;
            have_best = true;
        }
    };
    auto finish = [&]() -> FactorizationResult& {
        best.rank = rank;
        best.hamming_history = history;
        best.exact = best_h == 0;
        best.qubo_solver_time_s = use.solver_time_s - time_start;
        return best;
    };

    // Phase 1: NNSVD initialization with the full budget.
    {
        auto [a0, b0] = detail::nnsvd_init(m, rank);
        FactorizationResult r = iterative_matrix_factorization(
            m, a0, b0, params.l_c, params.l_h, use, mix_seed(params.seed, 1));
        consider(r);
        if (r.exact) return finish();
    }

    // Phase 2: short random restarts.
    struct PoolEntry {
        BooleanMatrix a, b;
        std::size_t h;
    };
    std::optional<PoolEntry> pool_best;
    for (int restart = 1; restart <= params.n_states; ++restart) {
        Rng rng(mix_seed(params.seed, 2, static_cast<std::uint64_t>(restart)));
        const double p = rng.uniform(0.1, 0.9);
        const BooleanMatrix a_init = detail::random_matrix(m.rows(), rank, p, rng);
        const BooleanMatrix b_init = detail::random_matrix(rank, m.cols(), p, rng);
        FactorizationResult r = iterative_matrix_factorization(
            m, a_init, b_init, params.l_c, params.rand_dur, use,
            mix_seed(params.seed, 3, static_cast<std::uint64_t>(restart)));
        consider(r);
        if (r.exact) return finish();
        const std::size_t h = hamming(m, bool_matmul(r.a, r.b));
        if (!pool_best || h < pool_best->h) pool_best = PoolEntry{r.a, r.b, h};
    }

    // Phase 3: re-iterate the best pool member with the full budget.
    if (pool_best) {
        FactorizationResult r = iterative_matrix_factorization(
            m, pool_best->a, pool_best->b, params.l_c, params.l_h, use,
            mix_seed(params.seed, 4));
        consider(r);
    }
    return finish();
}

} // namespace btn
