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

#include <chrono>
#include <cmath>
#include <ctime>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "btn/hubo.hpp"
#include "btn/random.hpp"

namespace btn {

struct SolveRequest {
    std::vector<Qubo> problems;
    int num_reads = 1;
    std::uint64_t seed = 0;
    int sweeps = 1000;
};

struct Sample {
    BitVec bits;
    double energy = 0.0;
    int multiplicity = 1;
};

struct ProblemResult {
    BitVec best_bits;
    double best_energy = 0.0;
    std::vector<Sample> samples;
    double solve_time_s = 0.0; // time spent inside the solver core only
};

struct SolveResult {
    std::vector<ProblemResult> problems;
};

namespace detail {

inline double process_cpu_seconds() {
#if defined(CLOCK_PROCESS_CPUTIME_ID)
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
#else
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
#endif
}

/// Linear + adjacency view of a QUBO for incremental single-flip updates.
struct FlipModel {
    VarIndex n = 0;
    double constant = 0.0;
    std::vector<double> linear;
    std::vector<std::vector<std::pair<VarIndex, double>>> adj;

    explicit FlipModel(const Qubo& q) : n(q.num_vars()), linear(n, 0.0), adj(n) {
        for (const auto& [m, c] : q.terms()) {
            if (m.empty()) {
                constant = c;
            } else if (m.size() == 1) {
                linear[m[0]] += c;
            } else {
                adj[m[0]].emplace_back(m[1], c);
                adj[m[1]].emplace_back(m[0], c);
            }
        }
    }

    /// Largest possible |energy change| of any single flip.
    double max_flip_delta() const {
        double d = 0.0;
        for (VarIndex i = 0; i < n; ++i) {
            double s = std::fabs(linear[i]);
            for (const auto& [j, c] : adj[i]) s += std::fabs(c);
            d = std::max(d, s);
        }
        return d;
    }
};

/// Mutable state: bits plus the local field g_i = h_i + sum_j J_ij x_j,
/// so that the energy change of flipping i is (1 - 2 x_i) * g_i.
struct FlipState {
    BitVec bits;
    std::vector<double> field;

    FlipState(const FlipModel& m, const BitVec& start) : bits(start), field(m.linear) {
        for (VarIndex i = 0; i < m.n; ++i)
            if (bits.get(i))
                for (const auto& [j, c] : m.adj[i]) field[j] += c;
    }

    double flip_delta(VarIndex i) const {
        return (bits.get(i) ? -1.0 : 1.0) * field[i];
    }

    void flip(const FlipModel& m, VarIndex i) {
        const double sign = bits.get(i) ? -1.0 : 1.0;
        bits.flip(i);
        for (const auto& [j, c] : m.adj[i]) field[j] += sign * c;
    }
};

inline BitVec random_bits(Rng& rng, std::size_t n) {
    BitVec b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, rng.bernoulli(0.5));
    return b;
}

/// Collects read outcomes, aggregating identical bitstrings and keeping the
/// first-found minimum as best.
struct SampleSet {
    std::vector<Sample> samples;
    std::size_t best = 0;

    void insert(const BitVec& bits, double energy) {
        for (auto& s : samples) {
            if (s.bits == bits) {
                s.multiplicity++;
                return;
            }
        }
        samples.push_back({bits, energy, 1});
        if (energy < samples[best].energy) best = samples.size() - 1;
    }
};

} // namespace detail

/// Solver backend contract: deterministic given (request, seed); every
/// returned sample's energy equals evaluate(problem, bits) exactly; best
/// sample attains the minimum energy among the samples.
class QuboSolver {
public:
    virtual ~QuboSolver() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const SolveRequest& req) const = 0;
};

/// Exact enumeration over all assignments, for problems of at most 24
/// variables. Assignments are scanned in counting order with variable 0 as
/// the least significant bit; ties keep the first (lexicographically
/// smallest) minimizer.
class ExhaustiveSolver final : public QuboSolver {
public:
    static constexpr VarIndex kMaxVars = 24;

    std::string name() const override { return "exhaustive"; }

    SolveResult solve(const SolveRequest& req) const override {
        SolveResult result;
        result.problems.reserve(req.problems.size());
        for (const Qubo& q : req.problems) {
            const double t0 = detail::process_cpu_seconds();
            if (q.num_vars() > kMaxVars)
                throw SolverError("exhaustive solver limit is " + std::to_string(kMaxVars) +
                                  " variables, got " + std::to_string(q.num_vars()));
            const VarIndex n = q.num_vars();

            std::vector<std::pair<std::uint32_t, double>> masked;
            double constant = 0.0;
            for (const auto& [m, c] : q.terms()) {
                if (m.empty()) {
                    constant = c;
                    continue;
                }
                std::uint32_t mask = 0;
                for (VarIndex v : m) mask |= 1u << v;
                masked.emplace_back(mask, c);
            }

            std::uint64_t best_state = 0;
            double best_energy = constant;
            const std::uint64_t states = 1ull << n;
            for (std::uint64_t k = 1; k < states; ++k) {
                double e = constant;
                for (const auto& [mask, c] : masked)
                    if ((k & mask) == mask) e += c;
                if (e < best_energy) {
                    best_energy = e;
                    best_state = k;
                }
            }

            ProblemResult pr;
            pr.best_bits = BitVec(n);
            for (VarIndex i = 0; i < n; ++i)
                pr.best_bits.set(i, (best_state >> i) & 1);
            pr.best_energy = evaluate(q, pr.best_bits);
            pr.samples.push_back({pr.best_bits, pr.best_energy, 1});
            pr.solve_time_s = detail::process_cpu_seconds() - t0;
            result.problems.push_back(std::move(pr));
        }
        return result;
    }
};

/// Single-spin-flip Metropolis annealer over binary variables with a
/// geometric inverse-temperature schedule. Each read is an independent
/// restart seeded from (request seed, problem index, read index), so results
/// do not depend on scheduling order.
class SimulatedAnnealingSolver final : public QuboSolver {
public:
    explicit SimulatedAnnealingSolver(double beta_start = 0.1) : beta_start_(beta_start) {}

    std::string name() const override { return "sa"; }

    SolveResult solve(const SolveRequest& req) const override {
        SolveResult result;
        result.problems.reserve(req.problems.size());
        for (std::size_t p = 0; p < req.problems.size(); ++p) {
            const Qubo& q = req.problems[p];
            const double t0 = detail::process_cpu_seconds();
            const detail::FlipModel model(q);
            const int sweeps = std::max(1, req.sweeps);

            // End temperature: the largest single-flip uphill move is
            // accepted with probability about 1e-3 at the final sweep.
            const double dmax = model.max_flip_delta();
            const double beta_end =
                dmax > 0.0 ? std::log(1e3) / dmax : beta_start_;
            const double beta_lo = std::min(beta_start_, beta_end);
            const double beta_hi = std::max(beta_start_, beta_end);
            const double ratio =
                sweeps > 1 ? std::pow(beta_hi / beta_lo, 1.0 / (sweeps - 1)) : 1.0;

            detail::SampleSet set;
            for (int read = 0; read < req.num_reads; ++read) {
                Rng rng(mix_seed(req.seed, p, static_cast<std::uint64_t>(read)));
                detail::FlipState state(model, detail::random_bits(rng, model.n));
                double beta = beta_lo;
                for (int sweep = 0; sweep < sweeps; ++sweep) {
                    for (VarIndex i = 0; i < model.n; ++i) {
                        const double delta = state.flip_delta(i);
                        if (delta <= 0.0 || rng.next_double() < std::exp(-beta * delta))
                            state.flip(model, i);
                    }
                    beta *= ratio;
                }
                set.insert(state.bits, evaluate(q, state.bits));
            }

            ProblemResult pr;
            if (model.n == 0) {
                pr.best_bits = BitVec(0);
                pr.best_energy = model.constant;
                pr.samples.push_back({pr.best_bits, pr.best_energy, req.num_reads});
            } else {
                pr.best_bits = set.samples[set.best].bits;
                pr.best_energy = set.samples[set.best].energy;
                pr.samples = std::move(set.samples);
            }
            pr.solve_time_s = detail::process_cpu_seconds() - t0;
            result.problems.push_back(std::move(pr));
        }
        return result;
    }

private:
    double beta_start_;
};

/// Greedy steepest descent: from a random start, repeatedly flip the single
/// variable giving the largest energy decrease (ties to the lowest index)
/// until no flip improves.
class GreedyDescentSolver final : public QuboSolver {
public:
    std::string name() const override { return "greedy"; }

    SolveResult solve(const SolveRequest& req) const override {
        SolveResult result;
        result.problems.reserve(req.problems.size());
        for (std::size_t p = 0; p < req.problems.size(); ++p) {
            const Qubo& q = req.problems[p];
            const double t0 = detail::process_cpu_seconds();
            const detail::FlipModel model(q);

            detail::SampleSet set;
            for (int read = 0; read < req.num_reads; ++read) {
                Rng rng(mix_seed(req.seed, p, static_cast<std::uint64_t>(read)));
                detail::FlipState state(model, detail::random_bits(rng, model.n));
                for (;;) {
                    double best_delta = 0.0;
                    VarIndex best_var = model.n;
                    for (VarIndex i = 0; i < model.n; ++i) {
                        const double delta = state.flip_delta(i);
                        if (delta < best_delta) {
                            best_delta = delta;
                            best_var = i;
                        }
                    }
                    if (best_var == model.n) break;
                    state.flip(model, best_var);
                }
                set.insert(state.bits, evaluate(q, state.bits));
            }

            ProblemResult pr;
            if (model.n == 0) {
                pr.best_bits = BitVec(0);
                pr.best_energy = model.constant;
                pr.samples.push_back({pr.best_bits, pr.best_energy, req.num_reads});
            } else {
                pr.best_bits = set.samples[set.best].bits;
                pr.best_energy = set.samples[set.best].energy;
                pr.samples = std::move(set.samples);
            }
            pr.solve_time_s = detail::process_cpu_seconds() - t0;
            result.problems.push_back(std::move(pr));
        }
        return result;
    }
};

/// Per-rank read budget: rank 2..8 map to {100, 200, 400, 600, 800, 1000,
/// 3000} reads; larger ranks clamp to 3000.
inline int reads_for_rank(int r) {
    static constexpr int table[] = {100, 200, 400, 600, 800, 1000, 3000};
    if (r < 2) throw ValueError("reads_for_rank: rank must be >= 2, got " + std::to_string(r));
    return r > 8 ? 3000 : table[r - 2];
}

/// Solves a batch of independent QUBOs by merging up to `capacity` of them
/// into one composite problem with disjoint variable blocks (no cross terms),
/// mirroring how many small problems share one annealer call. A seeded
/// shuffle permutes the problem-to-slot assignment before merging and is
/// inverted on return. Per-problem energies are recomputed exactly against
/// the original problems; composite solve time is split evenly over the
/// batch.
inline SolveResult pack_and_solve(const SolveRequest& req, const QuboSolver& backend,
                                  std::size_t capacity) {
    if (capacity < 1) throw ValueError("pack_and_solve: capacity must be >= 1");
    SolveResult result;
    result.problems.resize(req.problems.size());

    const std::size_t total = req.problems.size();
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < total; begin += capacity, ++batch_index) {
        const std::size_t end = std::min(begin + capacity, total);
        const std::size_t count = end - begin;

        // slot s holds problem perm[s]
        std::vector<std::size_t> perm(count);
        std::iota(perm.begin(), perm.end(), begin);
        Rng shuffle_rng(mix_seed(req.seed, 0x5105, batch_index));
        for (std::size_t s = count; s > 1; --s)
            std::swap(perm[s - 1], perm[shuffle_rng.below(s)]);

        std::vector<VarIndex> offset(count, 0);
        VarIndex composite_vars = 0;
        for (std::size_t s = 0; s < count; ++s) {
            offset[s] = composite_vars;
            composite_vars += req.problems[perm[s]].num_vars();
        }

        Qubo composite(composite_vars);
        for (std::size_t s = 0; s < count; ++s) {
            for (const auto& [m, c] : req.problems[perm[s]].terms()) {
                Monomial shifted(m);
                for (VarIndex& v : shifted) v += offset[s];
                composite.add(std::move(shifted), c);
            }
        }

        SolveRequest sub;
        sub.problems.push_back(std::move(composite));
        sub.num_reads = req.num_reads;
        sub.seed = mix_seed(req.seed, 0x9ac4, batch_index);
        sub.sweeps = req.sweeps;

        SolveResult solved;
        try {
            solved = backend.solve(sub);
        } catch (const Error& e) {
            throw SolverError("pack_and_solve: batch " + std::to_string(batch_index) +
                              " (slots 0.." + std::to_string(count - 1) +
                              "): " + e.what());
        }
        const ProblemResult& comp = solved.problems.at(0);

        for (std::size_t s = 0; s < count; ++s) {
            const std::size_t pidx = perm[s];
            const Qubo& q = req.problems[pidx];
            const VarIndex n = q.num_vars();
            ProblemResult pr;
            detail::SampleSet set;
            for (const Sample& sample : comp.samples) {
                BitVec block(n);
                for (VarIndex i = 0; i < n; ++i) block.set(i, sample.bits.get(offset[s] + i));
                for (int rep = 0; rep < sample.multiplicity; ++rep)
                    set.insert(block, evaluate(q, block));
            }
            pr.best_bits = set.samples[set.best].bits;
            pr.best_energy = set.samples[set.best].energy;
            pr.samples = std::move(set.samples);
            pr.solve_time_s = comp.solve_time_s / static_cast<double>(count);
            result.problems[pidx] = std::move(pr);
        }
    }
    return result;
}

inline std::unique_ptr<QuboSolver> make_solver(const std::string& name) {
    if (name == "exhaustive") return std::make_unique<ExhaustiveSolver>();
    if (name == "sa") return std::make_unique<SimulatedAnnealingSolver>();
    if (name == "greedy") return std::make_unique<GreedyDescentSolver>();
    throw ValueError("unknown solver '" + name + "' (expected exhaustive | sa | greedy)");
}

} // namespace btn
