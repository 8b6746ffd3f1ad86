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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mblmc/cost.hpp"
#include "mblmc/floquet.hpp"
#include "mblmc/mcmc.hpp"
#include "mblmc/rmt.hpp"

namespace mblmc::experiment {

using json = nlohmann::ordered_json;

/// Raised for malformed or out-of-range configuration. The message names the
/// offending JSON path (or line and column for syntax errors).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Floquet drive in units of J.
struct DriveSpec {
    double J = 4.15;
    double B0_over_J = 1.25;
    double deltaB_over_J = -1.25;
    double omega_over_J = 10.0;

    FloquetParams params(int n_qubits, double w_over_j) const;
};

struct ProblemSpec {
    std::string type = "mis";  // mis | maxcut | factorization
    std::string graph_source;                         // as written in the config
    std::optional<std::filesystem::path> graph_path;  // resolved
    int er_vertices = 9;
    double er_edge_probability = 0.7;
    std::uint64_t er_seed = 1;
    std::uint64_t factor_M = 15;
    int factor_bits = 3;
};

struct Problem {
    std::string type;
    KBodyHamiltonian hamiltonian{1};
    std::optional<Graph> graph;
    std::uint64_t factor_M = 0;
    int factor_bits = 0;
    std::vector<std::string> warnings;

    int n_qubits() const { return hamiltonian.n_qubits(); }
};

Problem build_problem(const ProblemSpec& spec);

struct ChainSpec {
    double beta = 1.0;
    int iterations = 500;
    EstimatorMode estimator;
    ReplayMode replay = ReplayMode::cached_state;
};

struct ThermalizeConfig {
    std::uint64_t seed = 1;
    int workers = 1;
    ProblemSpec problem;
    DriveSpec drive;
    std::vector<double> W_over_J{4.0, 100.0, 200.0, 400.0};
    int chains_per_W = 1;
    ChainSpec chain;
    IntegratorConfig integrator;
    std::vector<int> snapshots;
    double mixing_epsilon = 0.01;
};

struct SolveConfig {
    std::uint64_t seed = 1;
    ProblemSpec problem;
    DriveSpec drive;
    double W_over_J = 200.0;
    ChainSpec chain;
    IntegratorConfig integrator;
    std::vector<int> checkpoints;
    std::vector<std::uint64_t> shot_budgets{10000};
};

struct RmtConfig {
    std::uint64_t seed = 1;
    int workers = 1;
    int n_qubits = 5;
    DriveSpec drive;
    double W_over_J = 200.0;
    std::vector<int> M_values{1, 50, 150, 250};
    int ensemble_size = 500;
    int bins = kDefaultSpacingBins;
    bool haar_oracle = false;
    IntegratorConfig integrator;
};

/// A parsed JSON document plus the source line of every value, keyed by
/// JSON pointer, so validation errors can point into the file.
struct ConfigDocument {
    json value;
    std::string source = "<config>";
    std::filesystem::path base_dir;  // relative graph paths resolve here
    std::map<std::string, int> lines;
};

/// Syntax errors are reported with line and column.
ConfigDocument parse_config_text(const std::string& text, const std::string& source = "<config>",
                                 const std::filesystem::path& base_dir = {});
ConfigDocument load_config(const std::filesystem::path& path);

/// Parses and validates a configuration; missing fields take defaults and
/// unknown fields are rejected. An "out" field is accepted and ignored here.
ThermalizeConfig parse_thermalize(const ConfigDocument& doc);
SolveConfig parse_solve(const ConfigDocument& doc);
RmtConfig parse_rmt(const ConfigDocument& doc);

/// Fully resolved configuration, written next to every run's outputs.
json to_json(const ThermalizeConfig& c);
json to_json(const SolveConfig& c);
json to_json(const RmtConfig& c);

struct ThermalizeResult {
    std::vector<double> W_over_J;
    std::vector<double> acceptance_rates;  // chain 0 of each W
};

struct SolveResult {
    double min_cost = 0.0;
    std::size_t n_solutions = 0;
    double p_star = 0.0;
    double acceptance_rate = 0.0;
    bool solvable = true;
};

struct RmtRow {
    int M = 0;
    int n_qubits = 0;
    double js_to_cue = 0.0;
    double js_to_poisson = 0.0;
    int ensemble_size = 0;
    double mean_r = 0.0;
};

ThermalizeResult run_thermalize(const ThermalizeConfig& c, const std::filesystem::path& out_dir);
SolveResult run_solve(const SolveConfig& c, const std::filesystem::path& out_dir);
std::vector<RmtRow> run_rmt(const RmtConfig& c, const std::filesystem::path& out_dir);

/// One JSONL line per record.
json record_to_json(const IterationRecord& r);

}  // namespace mblmc::experiment
