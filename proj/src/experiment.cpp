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

#include "mblmc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "mblmc/parallel.hpp"
#include "mblmc/rng.hpp"

namespace mblmc::experiment {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Source positions. The text has already been accepted by the JSON parser, so
// this scanner only tracks structure and line numbers.

class LineScanner {
  public:
    LineScanner(const std::string& text, std::map<std::string, int>& out) : s_(text), out_(out) {}

    void run() {
        skip_ws();
        value("");
    }

  private:
    const std::string& s_;
    std::map<std::string, int>& out_;
    std::size_t pos_ = 0;
    int line_ = 1;

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) {
            if (s_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string_token() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\') {
                out += s_[pos_++];
            }
            out += s_[pos_++];
        }
        ++pos_;
        return out;
    }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    void value(const std::string& ptr) {
        out_[ptr] = line_;
        if (pos_ >= s_.size()) return;
        char c = s_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < s_.size() && s_[pos_] != '}') {
                std::string key = string_token();
                skip_ws();
                ++pos_;  // ':'
                skip_ws();
                value(ptr + "/" + escape(key));
                skip_ws();
                if (s_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            for (int i = 0; pos_ < s_.size() && s_[pos_] != ']'; ++i) {
                value(ptr + "/" + std::to_string(i));
                skip_ws();
                if (s_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[pos_]) == std::string_view::npos) ++pos_;
        }
    }
};

// ---------------------------------------------------------------------------
// Field access with defaults, type checks and unknown-key rejection.

class Reader {
  public:
    Reader(const ConfigDocument& doc, const json& node, std::string ptr)
        : doc_(doc), node_(node), ptr_(std::move(ptr)) {
        if (!node_.is_object()) fail_here("expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        std::string ptr = ptr_ + "/" + key;
        auto it = doc_.lines.find(ptr);
        if (it == doc_.lines.end()) it = doc_.lines.find(ptr_);
        std::string where = it == doc_.lines.end() ? doc_.source : fmt::format("{}:{}", doc_.source, it->second);
        throw ConfigError(fmt::format("{}: {}: {}", where, ptr, msg));
    }

    [[noreturn]] void fail_here(const std::string& msg) const {
        auto it = doc_.lines.find(ptr_);
        std::string where = it == doc_.lines.end() ? doc_.source : fmt::format("{}:{}", doc_.source, it->second);
        throw ConfigError(fmt::format("{}: {}: {}", where, ptr_.empty() ? "/" : ptr_, msg));
    }

    bool has(const char* key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json& raw(const char* key) {
        seen_.insert(key);
        return node_.at(key);
    }

    Reader child(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        if (!node_.contains(key)) return Reader(doc_, empty, ptr_ + "/" + key);
        return Reader(doc_, node_.at(key), ptr_ + "/" + key);
    }

    double number(const char* key, double def) {
        if (!has(key)) return def;
        const json& v = node_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "must be finite");
        return x;
    }

    std::int64_t integer(const char* key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
        if (!has(key)) return def;
        return as_integer(node_.at(key), key, lo, hi);
    }

    std::uint64_t unsigned_integer(const char* key, std::uint64_t def) {
        if (!has(key)) return def;
        const json& v = node_.at(key);
        if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const char* key, bool def) {
        if (!has(key)) return def;
        const json& v = node_.at(key);
        if (!v.is_boolean()) fail(key, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key, const std::string& def) {
        if (!has(key)) return def;
        const json& v = node_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    // Resolved configs carry a "command" tag; accept it when it names this subcommand.
    void command(const char* name) {
        if (has("command") && string("command", name) != name) fail("command", fmt::format("expected \"{}\"", name));
    }

    std::vector<double> numbers(const char* key, std::vector<double> def) {
        if (!has(key)) return def;
        std::vector<double> out;
        for (const json& v : array(key)) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) fail(key, "expected an array of finite numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    std::vector<std::int64_t> integers(const char* key, std::vector<std::int64_t> def, std::int64_t lo,
                                       std::int64_t hi) {
        if (!has(key)) return def;
        std::vector<std::int64_t> out;
        for (const json& v : array(key)) out.push_back(as_integer(v, key, lo, hi));
        return out;
    }

    void finish() const {
        for (const auto& [key, _] : node_.items()) {
            if (!seen_.contains(key)) fail(key, "unknown field");
        }
    }

  private:
    const ConfigDocument& doc_;
    const json& node_;
    std::string ptr_;
    std::set<std::string> seen_;

    const json& array(const char* key) const {
        const json& v = node_.at(key);
        if (!v.is_array()) fail(key, "expected an array");
        return v;
    }

    std::int64_t as_integer(const json& v, const char* key, std::int64_t lo, std::int64_t hi) const {
        if (!v.is_number_integer()) fail(key, "expected an integer");
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
            fail(key, fmt::format("must be in [{}, {}]", lo, hi));
        }
        std::int64_t x = v.get<std::int64_t>();
        if (x < lo || x > hi) fail(key, fmt::format("must be in [{}, {}]", lo, hi));
        return x;
    }
};

constexpr std::int64_t kIntMax = std::numeric_limits<int>::max();

DriveSpec read_drive(Reader r) {
    DriveSpec d;
    d.J = r.number("J", d.J);
    d.B0_over_J = r.number("B0_over_J", d.B0_over_J);
    d.deltaB_over_J = r.number("deltaB_over_J", d.deltaB_over_J);
    d.omega_over_J = r.number("omega_over_J", d.omega_over_J);
    if (!(d.J != 0.0)) r.fail("J", "must be nonzero");
    if (!(d.omega_over_J > 0.0)) r.fail("omega_over_J", "must be positive");
    r.finish();
    return d;
}

json drive_json(const DriveSpec& d) {
    return {{"J", d.J}, {"B0_over_J", d.B0_over_J}, {"deltaB_over_J", d.deltaB_over_J}, {"omega_over_J", d.omega_over_J}};
}

IntegratorConfig read_integrator(Reader r) {
    IntegratorConfig c;
    c.steps_per_period = static_cast<int>(r.integer("steps_per_period", c.steps_per_period, 2, kIntMax));
    c.tolerance = r.number("tolerance", c.tolerance);
    c.max_steps = static_cast<int>(r.integer("max_steps", c.max_steps, 1, kIntMax));
    if (!(c.tolerance > 0.0)) r.fail("tolerance", "must be positive");
    if (c.max_steps < c.steps_per_period) r.fail("max_steps", "must be at least steps_per_period");
    r.finish();
    return c;
}

json integrator_json(const IntegratorConfig& c) {
    return {{"steps_per_period", c.steps_per_period}, {"tolerance", c.tolerance}, {"max_steps", c.max_steps}};
}

ProblemSpec read_problem(Reader r, const ConfigDocument& doc) {
    ProblemSpec p;
    p.type = r.string("type", p.type);
    if (p.type == "mis" || p.type == "maxcut") {
        bool has_graph = r.has("graph");
        bool has_er = r.has("erdos_renyi");
        if (has_graph == has_er) r.fail("type", "graph problems need exactly one of \"graph\" or \"erdos_renyi\"");
        if (has_graph) {
            p.graph_source = r.string("graph", "");
            fs::path path = p.graph_source;
            if (path.is_relative() && !doc.base_dir.empty()) path = doc.base_dir / path;
            if (!fs::exists(path)) r.fail("graph", fmt::format("file not found: {}", path.string()));
            p.graph_path = path;
        } else {
            Reader er = r.child("erdos_renyi");
            p.er_vertices = static_cast<int>(er.integer("n", p.er_vertices, 1, KBodyHamiltonian::kMaxDiagonalQubits));
            p.er_edge_probability = er.number("p", p.er_edge_probability);
            if (p.er_edge_probability < 0.0 || p.er_edge_probability > 1.0) er.fail("p", "must be in [0, 1]");
            p.er_seed = er.unsigned_integer("seed", p.er_seed);
            er.finish();
        }
    } else if (p.type == "factorization") {
        Reader f = r.child("factorization");
        p.factor_bits = static_cast<int>(f.integer("n_bits", p.factor_bits, 2, KBodyHamiltonian::kMaxDiagonalQubits / 2));
        p.factor_M = f.unsigned_integer("M", p.factor_M);
        if (p.factor_M == 0) f.fail("M", "must be positive");
        f.finish();
    } else {
        r.fail("type", "expected \"mis\", \"maxcut\" or \"factorization\"");
    }
    r.finish();
    return p;
}

json problem_json(const ProblemSpec& p) {
    json out = {{"type", p.type}};
    if (p.type == "factorization") {
        out["factorization"] = {{"M", p.factor_M}, {"n_bits", p.factor_bits}};
    } else if (p.graph_path) {
        // Echo the path as written so the record does not depend on where it ran.
        out["graph"] = p.graph_source;
    } else {
        out["erdos_renyi"] = {{"n", p.er_vertices}, {"p", p.er_edge_probability}, {"seed", p.er_seed}};
    }
    return out;
}

ChainSpec read_chain(Reader r) {
    ChainSpec c;
    c.beta = r.number("beta", c.beta);
    if (!(c.beta > 0.0)) r.fail("beta", "must be positive");
    c.iterations = static_cast<int>(r.integer("iterations", c.iterations, 1, kIntMax));
    std::string est = r.string("estimator", "exact");
    if (est == "exact") {
        if (r.has("shots")) r.fail("shots", "only valid with \"estimator\": \"shots\"");
        c.estimator = EstimatorMode::exact();
    } else if (est == "shots") {
        if (!r.has("shots")) r.fail("estimator", "shot estimator needs \"shots\"");
        c.estimator = EstimatorMode::with_shots(static_cast<std::size_t>(r.integer("shots", 0, 1, kIntMax)));
    } else {
        r.fail("estimator", "expected \"exact\" or \"shots\"");
    }
    std::string replay = r.string("replay", "cached_state");
    if (replay == "cached_state") c.replay = ReplayMode::cached_state;
    else if (replay == "full_replay") c.replay = ReplayMode::full_replay;
    else r.fail("replay", "expected \"cached_state\" or \"full_replay\"");
    r.finish();
    return c;
}

json chain_json(const ChainSpec& c) {
    json out = {{"beta", c.beta}, {"iterations", c.iterations}};
    if (c.estimator.kind == EstimatorMode::Kind::exact) {
        out["estimator"] = "exact";
    } else {
        out["estimator"] = "shots";
        out["shots"] = c.estimator.shots;
    }
    out["replay"] = c.replay == ReplayMode::cached_state ? "cached_state" : "full_replay";
    return out;
}

// ---------------------------------------------------------------------------
// Output helpers.

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void prepare_out_dir(const fs::path& dir) {
    if (dir.empty()) throw std::invalid_argument("output directory is empty");
    fs::create_directories(dir);
}

std::string fmt_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

std::string trace_jsonl(const std::vector<IterationRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const std::map<double, double>& h) {
    std::string out = "cost,probability\n";
    for (const auto& [cost, p] : h) out += fmt::format("{},{}\n", fmt_double(cost), fmt_double(p));
    return out;
}

Minima solve_exactly(const Problem& problem, const GibbsObservable& obs) {
    return brute_force_minima(problem.hamiltonian, obs.energies);
}

}  // namespace

FloquetParams DriveSpec::params(int n_qubits, double w_over_j) const {
    FloquetParams p;
    p.n_qubits = n_qubits;
    p.J = J;
    p.B0 = B0_over_J * J;
    p.deltaB = deltaB_over_J * J;
    p.omega = omega_over_J * J;
    p.W = w_over_j * J;
    p.validate();
    return p;
}

Problem build_problem(const ProblemSpec& spec) {
    Problem out;
    out.type = spec.type;
    if (spec.type == "mis" || spec.type == "maxcut") {
        Graph g = spec.graph_path ? read_graph(*spec.graph_path)
                                  : erdos_renyi(spec.er_vertices, spec.er_edge_probability, spec.er_seed);
        out.hamiltonian = spec.type == "mis" ? mis_hamiltonian(g) : maxcut_hamiltonian(g);
        out.graph = std::move(g);
    } else if (spec.type == "factorization") {
        out.hamiltonian = factorization_hubo(spec.factor_M, spec.factor_bits);
        out.factor_M = spec.factor_M;
        out.factor_bits = spec.factor_bits;
        if (auto w = factorization_instance_warning(spec.factor_M, spec.factor_bits)) out.warnings.push_back(*w);
    } else {
        throw std::invalid_argument("unknown problem type: " + spec.type);
    }
    return out;
}

ConfigDocument parse_config_text(const std::string& text, const std::string& source, const fs::path& base_dir) {
    ConfigDocument doc;
    doc.source = source;
    doc.base_dir = base_dir;
    try {
        doc.value = json::parse(text);
    } catch (const json::parse_error& e) {
        // The library reports "line L, column C" in its message.
        throw ConfigError(fmt::format("{}: {}", source, e.what()));
    }
    LineScanner(text, doc.lines).run();
    if (!doc.value.is_object()) throw ConfigError(source + ":1: /: expected a JSON object");
    return doc;
}

ConfigDocument load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string(), path.parent_path());
}

ThermalizeConfig parse_thermalize(const ConfigDocument& doc) {
    Reader r(doc, doc.value, "");
    ThermalizeConfig c;
    c.seed = r.unsigned_integer("seed", c.seed);
    c.workers = static_cast<int>(r.integer("workers", c.workers, 1, 1024));
    r.command("thermalize");
    r.string("out", "");
    c.problem = read_problem(r.child("problem"), doc);
    c.drive = read_drive(r.child("drive"));
    c.W_over_J = r.numbers("W_over_J", c.W_over_J);
    if (c.W_over_J.empty()) r.fail("W_over_J", "needs at least one value");
    for (double w : c.W_over_J) {
        if (w < 0.0) r.fail("W_over_J", "values must be non-negative");
    }
    if (std::set<double>(c.W_over_J.begin(), c.W_over_J.end()).size() != c.W_over_J.size()) {
        r.fail("W_over_J", "values must be distinct");
    }
    c.chains_per_W = static_cast<int>(r.integer("chains_per_W", c.chains_per_W, 1, 100000));
    c.chain = read_chain(r.child("chain"));
    c.integrator = read_integrator(r.child("integrator"));
    for (auto k : r.integers("snapshots", {}, 1, kIntMax)) {
        if (k > c.chain.iterations) r.fail("snapshots", "snapshot beyond the last iteration");
        c.snapshots.push_back(static_cast<int>(k));
    }
    std::sort(c.snapshots.begin(), c.snapshots.end());
    c.snapshots.erase(std::unique(c.snapshots.begin(), c.snapshots.end()), c.snapshots.end());
    c.mixing_epsilon = r.number("mixing_epsilon", c.mixing_epsilon);
    if (!(c.mixing_epsilon > 0.0 && c.mixing_epsilon < 1.0)) r.fail("mixing_epsilon", "must be in (0, 1)");
    r.finish();
    c.drive.params(2, c.W_over_J.front());
    return c;
}

SolveConfig parse_solve(const ConfigDocument& doc) {
    Reader r(doc, doc.value, "");
    SolveConfig c;
    c.seed = r.unsigned_integer("seed", c.seed);
    r.command("solve");
    r.string("out", "");
    c.problem = read_problem(r.child("problem"), doc);
    c.drive = read_drive(r.child("drive"));
    c.W_over_J = r.number("W_over_J", c.W_over_J);
    if (c.W_over_J < 0.0) r.fail("W_over_J", "must be non-negative");
    c.chain = read_chain(r.child("chain"));
    c.integrator = read_integrator(r.child("integrator"));
    for (auto k : r.integers("checkpoints", {c.chain.iterations}, 1, kIntMax)) {
        if (k > c.chain.iterations) r.fail("checkpoints", "checkpoint beyond the last iteration");
        c.checkpoints.push_back(static_cast<int>(k));
    }
    std::sort(c.checkpoints.begin(), c.checkpoints.end());
    c.checkpoints.erase(std::unique(c.checkpoints.begin(), c.checkpoints.end()), c.checkpoints.end());
    if (r.has("shot_budgets")) {
        c.shot_budgets.clear();
        if (!r.raw("shot_budgets").is_array()) r.fail("shot_budgets", "expected an array");
        for (const json& v : r.raw("shot_budgets")) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
                r.fail("shot_budgets", "expected an array of positive integers");
            }
            c.shot_budgets.push_back(v.get<std::uint64_t>());
        }
    }
    r.finish();
    return c;
}

RmtConfig parse_rmt(const ConfigDocument& doc) {
    Reader r(doc, doc.value, "");
    RmtConfig c;
    c.seed = r.unsigned_integer("seed", c.seed);
    c.workers = static_cast<int>(r.integer("workers", c.workers, 1, 1024));
    r.command("rmt");
    r.string("out", "");
    c.n_qubits = static_cast<int>(r.integer("n_qubits", c.n_qubits, 2, 10));
    c.drive = read_drive(r.child("drive"));
    c.W_over_J = r.number("W_over_J", c.W_over_J);
    if (c.W_over_J < 0.0) r.fail("W_over_J", "must be non-negative");
    std::vector<std::int64_t> def(c.M_values.begin(), c.M_values.end());
    c.M_values.clear();
    for (auto m : r.integers("M_values", def, 1, 1000000)) c.M_values.push_back(static_cast<int>(m));
    std::sort(c.M_values.begin(), c.M_values.end());
    c.M_values.erase(std::unique(c.M_values.begin(), c.M_values.end()), c.M_values.end());
    c.ensemble_size = static_cast<int>(r.integer("ensemble_size", c.ensemble_size, 1, kIntMax));
    c.bins = static_cast<int>(r.integer("bins", c.bins, 1, 100000));
    c.haar_oracle = r.boolean("haar_oracle", c.haar_oracle);
    if (c.M_values.empty() && !c.haar_oracle) r.fail("M_values", "needs at least one value unless haar_oracle is set");
    c.integrator = read_integrator(r.child("integrator"));
    r.finish();
    c.drive.params(c.n_qubits, c.W_over_J);
    return c;
}

json to_json(const ThermalizeConfig& c) {
    return {{"command", "thermalize"},
            {"seed", c.seed},
            {"workers", c.workers},
            {"problem", problem_json(c.problem)},
            {"drive", drive_json(c.drive)},
            {"W_over_J", c.W_over_J},
            {"chains_per_W", c.chains_per_W},
            {"chain", chain_json(c.chain)},
            {"integrator", integrator_json(c.integrator)},
            {"snapshots", c.snapshots},
            {"mixing_epsilon", c.mixing_epsilon}};
}

json to_json(const SolveConfig& c) {
    return {{"command", "solve"},
            {"seed", c.seed},
            {"problem", problem_json(c.problem)},
            {"drive", drive_json(c.drive)},
            {"W_over_J", c.W_over_J},
            {"chain", chain_json(c.chain)},
            {"integrator", integrator_json(c.integrator)},
            {"checkpoints", c.checkpoints},
            {"shot_budgets", c.shot_budgets}};
}

json to_json(const RmtConfig& c) {
    return {{"command", "rmt"},
            {"seed", c.seed},
            {"workers", c.workers},
            {"n_qubits", c.n_qubits},
            {"drive", drive_json(c.drive)},
            {"W_over_J", c.W_over_J},
            {"M_values", c.M_values},
            {"ensemble_size", c.ensemble_size},
            {"bins", c.bins},
            {"haar_oracle", c.haar_oracle},
            {"integrator", integrator_json(c.integrator)}};
}

json record_to_json(const IterationRecord& r) {
    return {{"index", r.index},
            {"proposal_cost_expectation", r.proposal_cost_expectation},
            {"proposal_weight", r.proposal_weight},
            {"current_weight", r.current_weight},
            {"metropolis_ratio_q", r.metropolis_ratio_q},
            {"accepted", r.accepted},
            {"post_cost_expectation", r.post_cost_expectation},
            {"post_solution_mass", r.post_solution_mass},
            {"disorder_seed", r.disorder_seed},
            {"integrator_steps", r.integrator_steps}};
}

ThermalizeResult run_thermalize(const ThermalizeConfig& c, const fs::path& out_dir) {
    prepare_out_dir(out_dir);
    Problem problem = build_problem(c.problem);
    GibbsObservable obs = gibbs_observable(problem.hamiltonian, c.chain.beta);
    Minima minima = solve_exactly(problem, obs);
    write_json(out_dir / "resolved_config.json", to_json(c));

    struct Task {
        std::size_t w_index;
        int chain;
        ChainTrace trace;
        std::map<int, std::map<double, double>> snapshots;
    };
    std::vector<Task> tasks;
    for (std::size_t w = 0; w < c.W_over_J.size(); ++w) {
        for (int k = 0; k < c.chains_per_W; ++k) tasks.push_back({w, k, {}, {}});
    }

    parallel_for(tasks.size(), c.workers, [&](std::size_t t) {
        Task& task = tasks[t];
        ChainConfig cfg;
        cfg.floquet = c.drive.params(problem.n_qubits(), c.W_over_J[task.w_index]);
        cfg.integrator = c.integrator;
        cfg.beta = c.chain.beta;
        cfg.max_iters = c.chain.iterations;
        cfg.estimator = c.chain.estimator;
        cfg.replay = c.chain.replay;
        // Chain k sees the same random streams at every W.
        cfg.master_seed = derive_seed(c.seed, {static_cast<std::uint64_t>(task.chain)});
        std::set<int> wanted(c.snapshots.begin(), c.snapshots.end());
        task.trace = run_chain(cfg, obs, minima.solutions, [&](const IterationRecord& rec, const QuantumState& psi) {
            if (wanted.contains(rec.index)) task.snapshots[rec.index] = cost_histogram(psi, obs.energies);
        });
    });

    ThermalizeResult result;
    std::string csv =
        "W_over_J,chain,acceptance_rate,final_cost_expectation,best_solution_mass,mixing_time_lower_bound,min_cost\n";
    for (const Task& task : tasks) {
        double w = c.W_over_J[task.w_index];
        std::string tag = fmt::format("W{}", fmt_double(w));
        if (c.chains_per_W > 1) tag += fmt::format("_chain{}", task.chain);
        write_text(out_dir / fmt::format("trace_{}.jsonl", tag), trace_jsonl(task.trace.records));
        for (const auto& [k, h] : task.snapshots) {
            write_text(out_dir / fmt::format("histogram_{}_iter{}.csv", tag, k), histogram_csv(h));
        }
        double acc = task.trace.acceptance_rate;
        double mix = acc > 0.0 ? mixing_time_lower_bound(acc, c.mixing_epsilon) : std::numeric_limits<double>::infinity();
        csv += fmt::format("{},{},{},{},{},{},{}\n", fmt_double(w), task.chain, fmt_double(acc),
                           fmt_double(task.trace.records.back().post_cost_expectation),
                           fmt_double(best_solution_mass(task.trace)), fmt_double(mix), fmt_double(minima.min_cost));
        if (task.chain == 0) {
            result.W_over_J.push_back(w);
            result.acceptance_rates.push_back(acc);
        }
    }
    write_text(out_dir / "acceptance.csv", csv);
    return result;
}

SolveResult run_solve(const SolveConfig& c, const fs::path& out_dir) {
    prepare_out_dir(out_dir);
    Problem problem = build_problem(c.problem);
    GibbsObservable obs = gibbs_observable(problem.hamiltonian, c.chain.beta);
    Minima minima = solve_exactly(problem, obs);
    write_json(out_dir / "resolved_config.json", to_json(c));

    SolveResult result;
    result.min_cost = minima.min_cost;
    result.n_solutions = minima.solutions.size();

    json summary = {{"problem", problem.type},
                    {"n_qubits", problem.n_qubits()},
                    {"min_cost", minima.min_cost},
                    {"n_solutions", minima.solutions.size()}};
    json sols = json::array();
    for (const auto& b : minima.solutions) sols.push_back(b.to_string());
    summary["solutions"] = sols;
    summary["warnings"] = problem.warnings;

    if (problem.type == "factorization") {
        double target = -static_cast<double>(problem.factor_M) * static_cast<double>(problem.factor_M);
        result.solvable = std::abs(minima.min_cost - target) <= 1e-9 * (1.0 + std::abs(target));
        json factors = json::array();
        for (auto idx : minima.indices) {
            auto [p, q] = decode_factors(idx, problem.factor_bits);
            factors.push_back({p, q});
        }
        summary["factors"] = factors;
    }
    summary["solvable"] = result.solvable;
    if (!result.solvable) {
        write_json(out_dir / "summary.json", summary);
        return result;
    }

    ChainConfig cfg;
    cfg.floquet = c.drive.params(problem.n_qubits(), c.W_over_J);
    cfg.integrator = c.integrator;
    cfg.beta = c.chain.beta;
    cfg.max_iters = c.chain.iterations;
    cfg.estimator = c.chain.estimator;
    cfg.replay = c.chain.replay;
    cfg.master_seed = c.seed;
    ChainTrace trace = run_chain(cfg, obs, minima.solutions);
    write_text(out_dir / "trace.jsonl", trace_jsonl(trace.records));

    result.p_star = best_solution_mass(trace);
    result.acceptance_rate = trace.acceptance_rate;

    std::string csv = "chain_length,shot_budget,p_star,success_probability\n";
    json success = json::array();
    for (int len : c.checkpoints) {
        double p = best_solution_mass(trace, static_cast<std::size_t>(len));
        for (auto budget : c.shot_budgets) {
            double s = success_probability(p, budget);
            csv += fmt::format("{},{},{},{}\n", len, budget, fmt_double(p), fmt_double(s));
            success.push_back({{"chain_length", len}, {"shot_budget", budget}, {"p_star", p}, {"success_probability", s}});
        }
    }
    write_text(out_dir / "success.csv", csv);

    summary["acceptance_rate"] = trace.acceptance_rate;
    summary["p_star"] = result.p_star;
    summary["success"] = success;
    write_json(out_dir / "summary.json", summary);
    return result;
}

namespace {

std::string rhist_csv(const BinnedDistribution& emp, const BinnedDistribution& poisson, const BinnedDistribution& cue) {
    std::string out = "bin_lo,bin_hi,empirical_density,poisson_density,cue_density\n";
    for (std::size_t b = 0; b < emp.n_bins(); ++b) {
        double lo = emp.bin_edges[b];
        double hi = emp.bin_edges[b + 1];
        double w = hi - lo;
        out += fmt::format("{},{},{},{},{}\n", fmt_double(lo), fmt_double(hi), fmt_double(emp.masses[b] / w),
                           fmt_double(poisson.masses[b] / w), fmt_double(cue.masses[b] / w));
    }
    return out;
}

}  // namespace

std::vector<RmtRow> run_rmt(const RmtConfig& c, const fs::path& out_dir) {
    prepare_out_dir(out_dir);
    FloquetParams params = c.drive.params(c.n_qubits, c.W_over_J);
    write_json(out_dir / "resolved_config.json", to_json(c));

    BinnedDistribution poisson = reference_distribution(ReferenceDensity::poisson, c.bins);
    BinnedDistribution cue = reference_distribution(ReferenceDensity::cue, c.bins);

    std::string ref = "r,poisson_pdf,cue_pdf\n";
    constexpr int kRefPoints = 201;
    for (int i = 0; i < kRefPoints; ++i) {
        double r = static_cast<double>(i) / (kRefPoints - 1);
        ref += fmt::format("{},{},{}\n", fmt_double(r), fmt_double(poisson_pdf(r)), fmt_double(cue_pdf(r)));
    }
    write_text(out_dir / "reference_density.csv", ref);

    std::vector<RmtRow> rows;
    if (!c.M_values.empty()) {
        auto samples = product_ensemble_sweep(params, c.integrator, c.M_values, c.ensemble_size,
                                              derive_seed(c.seed, 0, Stream::ensemble), c.workers);
        std::string csv = "M,n_qubits,js_to_cue,js_to_poisson,ensemble_size,mean_r\n";
        for (int M : c.M_values) {
            const LevelSpacingSample& s = samples.at(M);
            BinnedDistribution emp = histogram(s, c.bins);
            RmtRow row{M, c.n_qubits, js_distance(emp, cue), js_distance(emp, poisson), c.ensemble_size, s.mean()};
            rows.push_back(row);
            csv += fmt::format("{},{},{},{},{},{}\n", M, c.n_qubits, fmt_double(row.js_to_cue),
                               fmt_double(row.js_to_poisson), c.ensemble_size, fmt_double(row.mean_r));
            write_text(out_dir / fmt::format("rhist_M{}.csv", M), rhist_csv(emp, poisson, cue));
        }
        write_text(out_dir / "js.csv", csv);
    }

    if (c.haar_oracle) {
        Eigen::Index dim = Eigen::Index{1} << c.n_qubits;
        LevelSpacingSample s = haar_ensemble(dim, c.ensemble_size, derive_seed(c.seed, 1, Stream::ensemble), c.workers);
        BinnedDistribution emp = histogram(s, c.bins);
        std::string csv = "n_qubits,ensemble_size,js_to_cue,js_to_poisson,mean_r\n";
        csv += fmt::format("{},{},{},{},{}\n", c.n_qubits, c.ensemble_size, fmt_double(js_distance(emp, cue)),
                           fmt_double(js_distance(emp, poisson)), fmt_double(s.mean()));
        write_text(out_dir / "haar.csv", csv);
        write_text(out_dir / "rhist_haar.csv", rhist_csv(emp, poisson, cue));
    }
    return rows;
}

}  // namespace mblmc::experiment
