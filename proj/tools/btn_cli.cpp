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

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "btn/btn.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BTN_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw btn::ValueError(std::string("BTN_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

struct SolverFlags {
    std::string solver = "sa";
    int reads = 0; // 0: per-rank schedule
    int sweeps = 1000;
    std::size_t capacity = 255;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--solver", flags.solver, "QUBO backend: exhaustive | sa | greedy")
        ->check(CLI::IsMember({"exhaustive", "sa", "greedy"}));
    cmd->add_option("--reads", flags.reads, "samples per QUBO (default: per-rank schedule)");
    cmd->add_option("--sweeps", flags.sweeps, "annealing sweeps per read");
    cmd->add_option("--capacity", flags.capacity, "problems merged per composite solve");
}

int run(int argc, char** argv) {
    CLI::App app{"Boolean tensor network decomposition toolkit"};
    app.require_subcommand(1);

    // ---- generate ----------------------------------------------------------
    std::string gen_kind = "tt", gen_out = "out.btn", gen_net_out;
    std::size_t gen_order = 4, gen_dim = 4, gen_rank = 3;
    std::uint64_t gen_seed = default_seed();
    CLI::App* gen = app.add_subcommand("generate", "sample a random network and its tensor");
    gen->add_option("--kind", gen_kind, "network family: tt | tucker | ht")
        ->check(CLI::IsMember({"tt", "tucker", "ht"}));
    gen->add_option("--order", gen_order, "tensor order")->required();
    gen->add_option("--dim", gen_dim, "size of every mode")->required();
    gen->add_option("--rank", gen_rank, "bond rank")->required();
    gen->add_option("--seed", gen_seed, "RNG seed (default: BTN_SEED or 0)");
    gen->add_option("--out", gen_out, "output tensor file (.btn)");
    gen->add_option("--net-out", gen_net_out, "also save the ground-truth network (.btnet)");

    // ---- decompose ---------------------------------------------------------
    std::string dec_input, dec_algo = "ttr", dec_out = "out.btnet", dec_report, dec_dump;
    std::size_t dec_rank = 3;
    std::uint64_t dec_seed = default_seed();
    SolverFlags dec_solver;
    CLI::App* dec = app.add_subcommand("decompose", "decompose a .btn tensor into a network");
    dec->add_option("input", dec_input, "input tensor (.btn)")->required();
    dec->add_option("--algo", dec_algo, "ht | tti | ttr | ti | tr")
        ->check(CLI::IsMember({"ht", "tti", "ttr", "ti", "tr"}));
    dec->add_option("--rank", dec_rank, "factorization rank")->required();
    dec->add_option("--seed", dec_seed, "RNG seed (default: BTN_SEED or 0)");
    dec->add_option("--out", dec_out, "output network (.btnet)");
    dec->add_option("--report", dec_report, "write a JSON run report");
    dec->add_option("--dump-qubo", dec_dump, "append every solved QUBO as JSON lines");
    add_solver_flags(dec, dec_solver);

    // ---- contract ----------------------------------------------------------
    std::string con_input, con_out = "out.btn";
    CLI::App* con = app.add_subcommand("contract", "contract a .btnet network to a tensor");
    con->add_option("input", con_input, "input network (.btnet)")->required();
    con->add_option("--out", con_out, "output tensor (.btn)");

    // ---- noise -------------------------------------------------------------
    std::string noi_input, noi_out = "noisy.btn";
    double noi_prob = 0.001;
    std::uint64_t noi_seed = default_seed();
    CLI::App* noi = app.add_subcommand("noise", "flip bits of a .btn tensor");
    noi->add_option("input", noi_input, "input tensor (.btn)")->required();
    noi->add_option("--prob", noi_prob, "per-bit flip probability");
    noi->add_option("--seed", noi_seed, "RNG seed (default: BTN_SEED or 0)");
    noi->add_option("--out", noi_out, "output tensor (.btn)");

    // ---- bench -------------------------------------------------------------
    std::vector<std::size_t> ben_orders{4}, ben_dims{4}, ben_ranks{3};
    std::string ben_algo = "ttr", ben_outdir = ".", ben_artifacts;
    bool ben_noise = false;
    double ben_noise_prob = 0.001;
    int ben_trials = 5;
    std::uint64_t ben_seed = default_seed();
    SolverFlags ben_solver;
    CLI::App* ben = app.add_subcommand("bench", "run the randomized benchmark protocol");
    ben->add_option("--algo", ben_algo, "ht | tti | ttr | ti | tr")
        ->check(CLI::IsMember({"ht", "tti", "ttr", "ti", "tr"}));
    ben->add_option("--order", ben_orders, "tensor order(s)")->delimiter(',');
    ben->add_option("--dim", ben_dims, "mode size(s)")->delimiter(',');
    ben->add_option("--rank", ben_ranks, "rank(s)")->delimiter(',');
    ben->add_flag("--noise", ben_noise, "enable the noisy arm");
    ben->add_option("--noise-prob", ben_noise_prob, "per-bit flip probability");
    ben->add_option("--trials", ben_trials, "tensors per configuration");
    ben->add_option("--seed", ben_seed, "RNG seed (default: BTN_SEED or 0)");
    ben->add_option("--out-dir", ben_outdir, "directory for report files");
    ben->add_option("--artifacts", ben_artifacts, "directory for per-trial .btn/.btnet files");
    add_solver_flags(ben, ben_solver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the diagnostic and usage
        return 2;
    }

    if (gen->parsed()) {
        auto [net, tensor] = btn::generate_ground_truth(btn::kind_from_string(gen_kind),
                                                        gen_order, gen_dim, gen_rank, gen_seed);
        btn::write_btn_file(tensor, gen_out);
        if (!gen_net_out.empty()) btn::write_btnet_file(net, gen_net_out);
        std::cout << "wrote " << gen_out << " (" << tensor.size() << " elements)\n";
        return 0;
    }

    if (dec->parsed()) {
        const btn::BooleanTensor tensor = btn::read_btn_file(dec_input);
        const auto solver = btn::make_solver(dec_solver.solver);
        btn::QuboCache cache;
        std::vector<std::string> qubo_log;
        btn::SolveContext ctx;
        ctx.solver = solver.get();
        ctx.cache = &cache;
        ctx.num_reads = dec_solver.reads > 0
                            ? dec_solver.reads
                            : btn::reads_for_rank(static_cast<int>(dec_rank));
        ctx.sweeps = dec_solver.sweeps;
        ctx.capacity = dec_solver.capacity;
        if (!dec_dump.empty()) ctx.qubo_log = &qubo_log;

        btn::FactorizationParams params;
        params.seed = dec_seed;
        const btn::Algorithm algo = btn::algorithm_from_string(dec_algo);
        const btn::TensorNetwork net = btn::decompose(algo, tensor, dec_rank, ctx, params);
        btn::write_btnet_file(net, dec_out);

        const btn::BooleanTensor reconstructed = btn::contract(net);
        const double err = btn::error_rate(tensor, reconstructed);
        if (!dec_report.empty()) {
            nlohmann::json j;
            j["schema"] = 1;
            j["config"] = {{"algorithm", dec_algo}, {"rank", dec_rank},
                           {"solver", dec_solver.solver}, {"seed", dec_seed},
                           {"num_reads", ctx.num_reads}, {"sweeps", ctx.sweeps},
                           {"capacity", ctx.capacity},   {"input", dec_input}};
            j["results"] = {{"error_rate", err},
                            {"exact", err == 0.0},
                            {"qubo_problems", ctx.problems_submitted}};
            j["timing"] = {{"solver_time_s", ctx.solver_time_s}};
            std::ofstream out(dec_report, std::ios::binary);
            if (!out) throw btn::IoError("cannot open for writing: " + dec_report);
            out << j.dump(2) << '\n';
        }
        if (!dec_dump.empty()) {
            std::ofstream out(dec_dump, std::ios::binary | std::ios::app);
            if (!out) throw btn::IoError("cannot open for writing: " + dec_dump);
            for (const std::string& line : qubo_log) out << line << '\n';
        }
        std::cout << "wrote " << dec_out << " (error rate " << err << ", solver time "
                  << ctx.solver_time_s << " s)\n";
        return 0;
    }

    if (con->parsed()) {
        const btn::TensorNetwork net = btn::read_btnet_file(con_input);
        btn::write_btn_file(btn::contract(net), con_out);
        std::cout << "wrote " << con_out << "\n";
        return 0;
    }

    if (noi->parsed()) {
        const btn::BooleanTensor tensor = btn::read_btn_file(noi_input);
        btn::write_btn_file(btn::add_noise(tensor, noi_prob, noi_seed), noi_out);
        std::cout << "wrote " << noi_out << "\n";
        return 0;
    }

    if (ben->parsed()) {
        for (std::size_t order : ben_orders)
            for (std::size_t dim : ben_dims)
                for (std::size_t rank : ben_ranks) {
                    btn::ExperimentConfig cfg;
                    cfg.algorithm = btn::algorithm_from_string(ben_algo);
                    cfg.order = order;
                    cfg.dim = dim;
                    cfg.rank = rank;
                    cfg.noise = ben_noise;
                    cfg.noise_prob = ben_noise_prob;
                    cfg.solver = ben_solver.solver;
                    cfg.seed = ben_seed;
                    cfg.trials = ben_trials;
                    cfg.num_reads = ben_solver.reads;
                    cfg.sweeps = ben_solver.sweeps;
                    cfg.capacity = ben_solver.capacity;
                    cfg.artifact_dir = ben_artifacts;
                    const std::string stem = ben_outdir + "/report_" + btn::detail::combo_stem(cfg);
                    cfg.output_json = stem + ".json";
                    cfg.output_csv = stem + ".csv";
                    const btn::RunReport report = btn::run_experiment(cfg);
                    std::cout << btn::detail::combo_stem(cfg) << ": mean error "
                              << report.error_mean << ", exact " << report.exact_count << "/"
                              << report.trials.size() << ", solver time " << report.time_mean
                              << " s -> " << cfg.output_json << "\n";
                }
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const btn::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const btn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
