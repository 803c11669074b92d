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

#include <optional>
#include <string>
#include <vector>

#include "btn/hierarchical_tucker.hpp"
#include "btn/tensor_io.hpp"
#include "btn/tensor_train.hpp"
#include "btn/tucker.hpp"

namespace btn {

enum class Algorithm { HT, TTI, TTR, TI, TR };

inline std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::HT: return "ht";
    case Algorithm::TTI: return "tti";
    case Algorithm::TTR: return "ttr";
    case Algorithm::TI: return "ti";
    case Algorithm::TR: return "tr";
    }
    return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ht") return Algorithm::HT;
    if (s == "tti") return Algorithm::TTI;
    if (s == "ttr") return Algorithm::TTR;
    if (s == "ti") return Algorithm::TI;
    if (s == "tr") return Algorithm::TR;
    throw ValueError("unknown algorithm '" + s + "' (expected ht | tti | ttr | ti | tr)");
}

/// The network family an algorithm produces (and is benchmarked against).
inline NetworkKind kind_for(Algorithm a) {
    switch (a) {
    case Algorithm::HT: return NetworkKind::HT;
    case Algorithm::TTI:
    case Algorithm::TTR: return NetworkKind::TT;
    case Algorithm::TI:
    case Algorithm::TR: return NetworkKind::Tucker;
    }
    return NetworkKind::TT;
}

/// Runs the selected decomposition, producing a contractible network.
inline TensorNetwork decompose(Algorithm algorithm, const BooleanTensor& t, std::size_t rank,
                               SolveContext& solve, const FactorizationParams& params = {}) {
    switch (algorithm) {
    case Algorithm::HT: return hierarchical_tucker(t, 1, rank, solve, params);
    case Algorithm::TTI: return tensor_train(t, /*recursive=*/false, rank, solve, params);
    case Algorithm::TTR: return tensor_train(t, /*recursive=*/true, rank, solve, params);
    case Algorithm::TI: {
        TuckerResult r = iterative_tucker(t, rank, solve, params);
        return tucker_network(std::move(r), t.dims());
    }
    case Algorithm::TR: {
        TuckerResult r = recursive_tucker(t, rank, 4, solve, params);
        return tucker_network(std::move(r), t.dims());
    }
    }
    throw ValueError("unknown algorithm");
}

// ---------------------------------------------------------------------------
// Ground-truth generation and the noise model
// ---------------------------------------------------------------------------

namespace detail {

inline void fill_random(BooleanTensor& t, double p, Rng& rng) {
    for (std::size_t i = 0; i < t.size(); ++i) t.set(i, rng.bernoulli(p));
}

/// Mirrors the HT decomposition's tree skeleton for `count` modes.
inline HtSubtree random_ht_subtree(const Dims& mode_dims, std::size_t rank, std::size_t q,
                                   std::uint64_t seed, std::size_t& node_counter,
                                   const std::optional<double>& forced_p) {
    auto fill_node = [&](BooleanTensor& t) {
        Rng rng(mix_seed(seed, 0x90DE, node_counter++));
        const double p = forced_p ? *forced_p : rng.uniform(0.01, 0.99);
        fill_random(t, p, rng);
    };

    const std::size_t s = mode_dims.size();
    if (s == 1) {
        BooleanTensor leaf({mode_dims[0], q});
        fill_node(leaf);
        HtSubtree sub;
        sub.nodes.push_back({NodeRole::HTLeaf, std::move(leaf)});
        sub.bond = {0, 1};
        return sub;
    }
    const std::size_t s2 = s / 2;
    BooleanTensor core({q, rank, rank});
    fill_node(core);
    HtSubtree sub;
    sub.nodes.push_back({NodeRole::HTCore, std::move(core)});
    sub.bond = {0, 0};
    Dims left(mode_dims.begin(), mode_dims.begin() + static_cast<std::ptrdiff_t>(s2));
    Dims right(mode_dims.begin() + static_cast<std::ptrdiff_t>(s2), mode_dims.end());
    attach_child(sub, {0, 1},
                 random_ht_subtree(left, rank, rank, seed, node_counter, forced_p));
    attach_child(sub, {0, 2},
                 random_ht_subtree(right, rank, rank, seed, node_counter, forced_p));
    return sub;
}

} // namespace detail

/// Samples a random ground-truth network of the given family: every factor
/// node is filled i.i.d. Bernoulli(p) with one p drawn per node uniformly in
/// [0.01, 0.99]. Returns the network and its contraction. `forced_p` is a
/// test hook overriding the per-node density.
inline std::pair<TensorNetwork, BooleanTensor> generate_ground_truth(
    NetworkKind kind, std::size_t order, std::size_t dim, std::size_t rank,
    std::uint64_t seed, std::optional<double> forced_p = std::nullopt) {
    if (order < 2) throw ValueError("generate_ground_truth: order must be >= 2");
    if (kind == NetworkKind::TT && order < 3)
        throw ValueError("generate_ground_truth: TT needs order >= 3");
    if (dim < 1 || rank < 1) throw ValueError("generate_ground_truth: dim and rank >= 1");

    std::size_t node_counter = 0;
    auto fill_node = [&](BooleanTensor& t) {
        Rng rng(mix_seed(seed, 0x90DE, node_counter++));
        const double p = forced_p ? *forced_p : rng.uniform(0.01, 0.99);
        detail::fill_random(t, p, rng);
    };

    TensorNetwork net;
    const Dims target(order, dim);
    switch (kind) {
    case NetworkKind::TT: {
        std::vector<BooleanTensor> nodes;
        nodes.emplace_back(Dims{dim, rank});
        for (std::size_t k = 1; k + 1 < order; ++k) nodes.emplace_back(Dims{rank, dim, rank});
        nodes.emplace_back(Dims{rank, dim});
        for (auto& n : nodes) fill_node(n);
        net = make_tt_network(std::move(nodes), target);
        break;
    }
    case NetworkKind::Tucker: {
        BooleanTensor core(Dims(order, rank));
        fill_node(core);
        std::vector<BooleanMatrix> factors;
        for (std::size_t k = 0; k < order; ++k) {
            BooleanTensor f({dim, rank});
            fill_node(f);
            factors.push_back(BooleanMatrix::from_tensor(f));
        }
        net = make_tucker_network(std::move(core), std::move(factors), target);
        break;
    }
    case NetworkKind::HT: {
        detail::HtSubtree sub =
            detail::random_ht_subtree(target, rank, 1, seed, node_counter, forced_p);
        net.kind = NetworkKind::HT;
        net.target_dims = target;
        net.nodes = std::move(sub.nodes);
        net.edges = std::move(sub.edges);
        validate(net);
        break;
    }
    }
    return {net, contract(net)};
}

/// Flips each bit independently with the given probability; when no bit
/// flips, exactly one uniformly random bit is flipped instead, so noisy
/// input always differs from the original.
inline BooleanTensor add_noise(const BooleanTensor& t, double prob, std::uint64_t seed) {
    if (prob < 0.0 || prob >= 1.0)
        throw ValueError("add_noise: probability must lie in [0, 1)");
    BooleanTensor out = t;
    Rng rng(mix_seed(seed, 0x0153));
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (rng.bernoulli(prob)) {
            out.mutable_data().flip(i);
            ++flipped;
        }
    if (flipped == 0) out.mutable_data().flip(rng.below(out.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::TTR;
    std::size_t order = 3;
    std::size_t dim = 4;
    std::size_t rank = 3;
    bool noise = false;       // noisy arm of the protocol
    double noise_prob = 0.001;
    std::string solver = "sa";
    std::uint64_t seed = 0;
    int trials = 5;
    int num_reads = 0; // 0: use the per-rank schedule
    int sweeps = 1000;
    std::size_t capacity = 255;
    std::string output_json;  // empty: do not write
    std::string output_csv;   // empty: do not write
    std::string artifact_dir; // empty: do not save per-trial tensors/networks
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double error_rate = 0.0;
    bool exact = false;
    double solver_time_s = 0.0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    double error_mean = 0.0, error_min = 0.0, error_max = 0.0;
    double time_mean = 0.0, time_min = 0.0, time_max = 0.0;
    int exact_count = 0;
};

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw ValueError("config: trials must be >= 1");
    if (cfg.noise_prob < 0.0 || cfg.noise_prob >= 1.0)
        throw ValueError("config: noise_prob must lie in [0, 1)");
    if (cfg.rank < 2) throw ValueError("config: rank must be >= 2");
    if (cfg.order < 2 || (kind_for(cfg.algorithm) == NetworkKind::TT && cfg.order < 3))
        throw ValueError("config: order too small for the chosen algorithm");
    if (cfg.dim < 2) throw ValueError("config: dim must be >= 2");
    make_solver(cfg.solver); // throws on unknown name
}

namespace detail {

inline std::string combo_stem(const ExperimentConfig& cfg) {
    return to_string(cfg.algorithm) + "_o" + std::to_string(cfg.order) + "_d" +
           std::to_string(cfg.dim) + "_r" + std::to_string(cfg.rank) +
           (cfg.noise ? "_noisy" : "_clean");
}

} // namespace detail

/// JSON report. Timing lives in its own section so that the deterministic
/// sections can be compared byte for byte across runs.
inline nlohmann::json report_to_json(const RunReport& report) {
    const ExperimentConfig& cfg = report.config;
    nlohmann::json j;
    j["schema"] = 1;
    j["config"] = {{"algorithm", to_string(cfg.algorithm)}, {"order", cfg.order},
                   {"dim", cfg.dim},                        {"rank", cfg.rank},
                   {"noise", cfg.noise},                    {"noise_prob", cfg.noise_prob},
                   {"solver", cfg.solver},                  {"seed", cfg.seed},
                   {"trials", cfg.trials},                  {"num_reads", cfg.num_reads},
                   {"sweeps", cfg.sweeps},                  {"capacity", cfg.capacity}};
    j["results"] = nlohmann::json::array();
    for (const TrialResult& t : report.trials)
        j["results"].push_back({{"trial", t.trial},
                                {"seed", t.seed},
                                {"error_rate", t.error_rate},
                                {"exact", t.exact}});
    j["aggregates"] = {{"error_mean", report.error_mean},
                       {"error_min", report.error_min},
                       {"error_max", report.error_max},
                       {"exact_count", report.exact_count}};
    nlohmann::json times = nlohmann::json::array();
    for (const TrialResult& t : report.trials) times.push_back(t.solver_time_s);
    j["timing"] = {{"solver_time_s", times},
                   {"time_mean", report.time_mean},
                   {"time_min", report.time_min},
                   {"time_max", report.time_max}};
    return j;
}

inline std::string report_to_csv(const RunReport& report) {
    const ExperimentConfig& cfg = report.config;
    std::string out = "algo,order,dim,rank,noise,trial,error_rate,solver_time_s,exact,seed\n";
    char line[256];
    for (const TrialResult& t : report.trials) {
        std::snprintf(line, sizeof(line), "%s,%zu,%zu,%zu,%.17g,%d,%.17g,%.17g,%d,%llu\n",
                      to_string(cfg.algorithm).c_str(), cfg.order, cfg.dim, cfg.rank,
                      cfg.noise ? cfg.noise_prob : 0.0, t.trial, t.error_rate,
                      t.solver_time_s, t.exact ? 1 : 0,
                      static_cast<unsigned long long>(t.seed));
        out += line;
    }
    return out;
}

/// Runs the full per-configuration protocol: per trial, generate a random
/// ground-truth network of the matching family, contract it to the input
/// tensor, optionally apply the noise arm, decompose, contract the result,
/// and score the error rate. Reads default to the per-rank schedule.
/// Deterministic per (config, seed) except for the timing section.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    RunReport report;
    report.config = cfg;
    report.config.num_reads =
        cfg.num_reads > 0 ? cfg.num_reads : reads_for_rank(static_cast<int>(cfg.rank));

    const auto solver = make_solver(cfg.solver);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = mix_seed(cfg.seed, 0x7217A1, trial);
        auto [gt_net, tensor] = generate_ground_truth(kind_for(cfg.algorithm), cfg.order,
                                                      cfg.dim, cfg.rank,
                                                      mix_seed(trial_seed, 1));
        if (cfg.noise) tensor = add_noise(tensor, cfg.noise_prob, mix_seed(trial_seed, 2));

        QuboCache cache; // each trial owns its cache
        SolveContext ctx;
        ctx.solver = solver.get();
        ctx.cache = &cache;
        ctx.num_reads = report.config.num_reads;
        ctx.sweeps = cfg.sweeps;
        ctx.capacity = cfg.capacity;

        FactorizationParams params;
        params.seed = mix_seed(trial_seed, 3);
        const TensorNetwork net = decompose(cfg.algorithm, tensor, cfg.rank, ctx, params);
        const BooleanTensor reconstructed = contract(net);

        TrialResult result;
        result.trial = trial;
        result.seed = trial_seed;
        result.error_rate = error_rate(tensor, reconstructed);
        result.exact = result.error_rate == 0.0;
        result.solver_time_s = ctx.solver_time_s;
        report.trials.push_back(result);

        if (!cfg.artifact_dir.empty()) {
            const std::string stem =
                cfg.artifact_dir + "/" + detail::combo_stem(cfg) + "_t" + std::to_string(trial);
            write_btn_file(tensor, stem + ".btn");
            write_btnet_file(net, stem + ".btnet");
        }
    }

    report.error_min = report.error_max = report.trials[0].error_rate;
    report.time_min = report.time_max = report.trials[0].solver_time_s;
    for (const TrialResult& t : report.trials) {
        report.error_mean += t.error_rate;
        report.time_mean += t.solver_time_s;
        report.error_min = std::min(report.error_min, t.error_rate);
        report.error_max = std::max(report.error_max, t.error_rate);
        report.time_min = std::min(report.time_min, t.solver_time_s);
        report.time_max = std::max(report.time_max, t.solver_time_s);
        if (t.exact) report.exact_count++;
    }
    report.error_mean /= report.trials.size();
    report.time_mean /= report.trials.size();

    if (!cfg.output_json.empty()) {
        std::ofstream out(cfg.output_json, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + cfg.output_json);
        out << report_to_json(report).dump(2) << '\n';
    }
    if (!cfg.output_csv.empty()) {
        std::ofstream out(cfg.output_csv, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + cfg.output_csv);
        out << report_to_csv(report);
    }
    return report;
}

} // namespace btn
