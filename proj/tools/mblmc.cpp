// Copyright 2026 The mblmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: thermalize, solve and rmt runs from a JSON config.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mblmc/experiment.hpp"
#include "mblmc/floquet.hpp"

namespace ex = mblmc::experiment;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "master seed (overrides the config)");
    cmd->add_option("--out", args.out, "output directory (overrides the config)");
}

// Applies flag overrides to the document before validation.
ex::ConfigDocument resolve(const CommonArgs& args) {
    ex::ConfigDocument doc = ex::load_config(args.config);
    if (args.seed) doc.value["seed"] = *args.seed;
    if (!args.out.empty()) doc.value["out"] = args.out;
    if (!doc.value.contains("out") || !doc.value["out"].is_string() || doc.value["out"].get<std::string>().empty()) {
        throw ex::ConfigError(args.config + ": no output directory (set \"out\" or pass --out)");
    }
    return doc;
}

fs::path out_dir(const ex::ConfigDocument& doc) { return doc.value["out"].get<std::string>(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Many-body-localized Markov chain Monte Carlo experiments"};
    app.require_subcommand(1);

    CommonArgs thermalize_args, solve_args, rmt_args;
    auto* thermalize = app.add_subcommand("thermalize", "run chains across disorder strengths");
    add_common(thermalize, thermalize_args);
    auto* solve = app.add_subcommand("solve", "solve one optimization instance and report success metrics");
    add_common(solve, solve_args);
    auto* rmt = app.add_subcommand("rmt", "level-spacing statistics of products of Floquet propagators");
    add_common(rmt, rmt_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (thermalize->parsed()) {
            auto doc = resolve(thermalize_args);
            auto cfg = ex::parse_thermalize(doc);
            auto res = ex::run_thermalize(cfg, out_dir(doc));
            for (std::size_t i = 0; i < res.W_over_J.size(); ++i) {
                std::cout << "W/J=" << res.W_over_J[i] << " acceptance_rate=" << res.acceptance_rates[i] << "\n";
            }
        } else if (solve->parsed()) {
            auto doc = resolve(solve_args);
            auto cfg = ex::parse_solve(doc);
            auto problem = ex::build_problem(cfg.problem);
            for (const auto& w : problem.warnings) std::cerr << "warning: " << w << "\n";
            auto res = ex::run_solve(cfg, out_dir(doc));
            if (!res.solvable) {
                std::cerr << "error: no assignment reaches -M^2; the instance has no factorization in the given"
                             " bit width\n";
                return 3;
            }
            std::cout << "min_cost=" << res.min_cost << " solutions=" << res.n_solutions << " p_star=" << res.p_star
                      << " acceptance_rate=" << res.acceptance_rate << "\n";
        } else if (rmt->parsed()) {
            auto doc = resolve(rmt_args);
            auto cfg = ex::parse_rmt(doc);
            for (const auto& row : ex::run_rmt(cfg, out_dir(doc))) {
                std::cout << "M=" << row.M << " js_to_cue=" << row.js_to_cue << " js_to_poisson=" << row.js_to_poisson
                          << "\n";
            }
        }
    } catch (const ex::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mblmc::ConvergenceError& e) {
        std::cerr << "integrator error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
