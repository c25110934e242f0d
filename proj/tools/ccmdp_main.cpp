#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ccmdp/evaluate.hpp"
#include "ccmdp/generate.hpp"
#include "ccmdp/instance.hpp"
#include "ccmdp/io.hpp"
#include "ccmdp/layered_graph.hpp"
#include "ccmdp/oracle.hpp"
#include "ccmdp/report.hpp"
#include "ccmdp/solver.hpp"

namespace {

using namespace ccmdp;
using Clock = std::chrono::steady_clock;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

int default_threads() {
    if (const char* env = std::getenv("CCMDP_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

const char* mode_name(Mode m) { return m == Mode::ChanceConstrained ? "cc" : "cost"; }

Mode parse_mode(const std::string& s) {
    if (s == "cc") return Mode::ChanceConstrained;
    if (s == "cost") return Mode::CostConstrained;
    throw std::runtime_error("unknown mode '" + s + "' (expected cc or cost)");
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "lim") return Algorithm::Limited;
    if (s == "dis") return Algorithm::Disjoint;
    if (s == "local") return Algorithm::Local;
    if (s == "auto") return Algorithm::Auto;
    throw std::runtime_error("unknown algorithm '" + s + "'");
}

const char* route_name(Algorithm a) {
    switch (a) {
        case Algorithm::Limited: return "lim";
        case Algorithm::Disjoint: return "dis";
        case Algorithm::Local: return "local";
        case Algorithm::Auto: break;
    }
    return "auto";
}

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void emit(const Report& r, bool json) { std::cout << (json ? r.json() : r.text()); }

struct SolveArgs {
    std::string instance_path;
    double eps = 0.1;
    std::string algorithm = "auto";
    std::string mode;  // empty accepts either mode
    bool trim = true;
    int gamma_cap = 3;
    int psi_cap = 3;
    std::uint64_t seed = 0;
    int threads = default_threads();
    std::string policy_out;  // empty derives "<instance>.policy"
    double oracle_cap = 1e7;
    bool json = false;
};

void add_solve_flags(CLI::App* cmd, SolveArgs& a, bool with_oracle) {
    cmd->add_option("instance", a.instance_path, "Instance file")->required();
    cmd->add_option("--eps", a.eps, "Approximation parameter in (0, 1)")
        ->capture_default_str();
    cmd->add_option("--algorithm", a.algorithm, "Solver route: lim, dis, local, or auto")
        ->check(CLI::IsMember({"lim", "dis", "local", "auto"}))
        ->capture_default_str();
    cmd->add_option("--mode", a.mode, "Require the instance mode to be cc or cost")
        ->check(CLI::IsMember({"cc", "cost"}));
    cmd->add_flag("--trim-umax,!--no-trim-umax", a.trim,
                  "Tighten the utility ceiling before discretizing (default on)");
    cmd->add_option("--gamma-cap", a.gamma_cap,
                    "Largest branching the enumeration route accepts")
        ->capture_default_str();
    cmd->add_option("--psi-cap", a.psi_cap, "Largest cluster the cluster route accepts")
        ->capture_default_str();
    cmd->add_option("--seed", a.seed, "Seed echoed into the report")->capture_default_str();
    cmd->add_option("--threads", a.threads,
                    "Worker threads (default: CCMDP_THREADS or all cores)")
        ->capture_default_str();
    cmd->add_flag("--json", a.json, "Emit the report as JSON");
    if (with_oracle) {
        cmd->add_option("--oracle-cap", a.oracle_cap,
                        "Refuse enumeration beyond this many candidate assignments")
            ->capture_default_str();
    } else {
        cmd->add_option("--policy-out", a.policy_out,
                        "Policy output path (default: <instance>.policy)");
    }
}

int run_solve(const SolveArgs& a, bool with_oracle) {
    const auto t0 = Clock::now();
    const MdpInstance inst = parse_instance(slurp(a.instance_path));
    if (!a.mode.empty() && inst.mode != parse_mode(a.mode))
        throw std::runtime_error(std::string("instance mode is ") + mode_name(inst.mode) +
                                 ", expected " + a.mode);
    SolveOptions opts;
    opts.eps = a.eps;
    opts.algorithm = parse_algorithm(a.algorithm);
    opts.trim = a.trim;
    opts.gamma_cap = a.gamma_cap;
    opts.psi_cap = a.psi_cap;
    opts.threads = a.threads;
    const SolveResult res = solve(inst, opts);
    const bool feasible = res.status == SolveStatus::Feasible;

    std::optional<OracleResult> oracle;
    if (with_oracle) oracle = enumerate_optimal(inst, a.oracle_cap);

    std::string policy_path;
    if (feasible && !with_oracle) {
        policy_path = a.policy_out.empty() ? a.instance_path + ".policy" : a.policy_out;
        spill(policy_path, serialize_policy(inst, res.policy));
    }

    Report r;
    r.add("status", feasible ? "feasible" : "infeasible");
    r.add("algorithm", route_name(res.stats.route));
    r.add("scheme", res.stats.scheme == GridScheme::OnePart ? "one-part" : "three-part");
    r.add("mode", mode_name(inst.mode));
    r.add("eps", res.stats.eps);
    r.add("budget", inst.budget);
    r.add("gamma", res.stats.gamma);
    r.add("psi", res.stats.psi_inclusive);
    r.add("max_cluster", res.stats.max_cluster);
    r.add("u_max", res.stats.u_max);
    r.add("trimmed", res.stats.trimmed);
    r.add("table_cells", res.stats.table_cells);
    r.add("feasible", feasible);
    if (feasible) {
        r.add("value", res.report.value);
        r.add("value_bar", res.value_bar);
        r.add("risk_or_cost", res.report.risk_or_cost);
        r.add("demand_index", res.stats.demand_index);
    }
    if (oracle) {
        const bool oracle_feasible = oracle->optimal_policy.has_value();
        r.add("oracle_feasible", oracle_feasible);
        if (oracle_feasible) {
            r.add("oracle_value", oracle->optimal_value);
            if (feasible)
                r.add("ratio", oracle->optimal_value > 0
                                   ? res.report.value / oracle->optimal_value
                                   : 1.0);
        }
    }
    if (!policy_path.empty()) r.add("policy_file", policy_path);
    r.add("seed", static_cast<std::int64_t>(a.seed));
    r.add("threads", a.threads);
    r.add("wall_time_ms", elapsed_ms(t0));
    emit(r, a.json);
    return feasible ? 0 : 2;
}

struct VerifyArgs {
    std::string instance_path;
    std::string policy_path;
    std::int64_t simulate = 0;
    std::uint64_t seed = 0;
    int threads = default_threads();
    bool json = false;
};

int run_verify(const VerifyArgs& a) {
    const MdpInstance inst = parse_instance(slurp(a.instance_path));
    const Policy policy = parse_policy(inst, slurp(a.policy_path));
    const LayeredGraph g = build_layers(inst);
    const EvalReport rep = evaluate_policy(inst, g, policy);
    Report r;
    r.add("mode", mode_name(inst.mode));
    r.add("value", rep.value);
    r.add("risk_or_cost", rep.risk_or_cost);
    r.add("budget", inst.budget);
    r.add("feasible", rep.feasible);
    if (a.simulate > 0) {
        r.add("sim_risk_or_cost",
              simulate_risk(inst, policy, a.simulate, a.seed, a.threads));
        r.add("sim_samples", a.simulate);
        r.add("sim_seed", static_cast<std::int64_t>(a.seed));
    }
    emit(r, a.json);
    return rep.feasible ? 0 : 2;
}

struct LayeredArgs {
    std::string out_path;
    LayeredParams p;
    std::string mode = "cc";
    bool json = false;
};

struct GridworldArgs {
    std::string out_path;
    GridworldParams p;
    std::vector<std::string> cliffs;
    bool json = false;
};

int emit_generated(const MdpInstance& inst, const std::string& path, std::uint64_t seed,
                   bool json) {
    spill(path, serialize_instance(inst));
    Report r;
    r.add("path", path);
    r.add("states", inst.num_states());
    r.add("actions", inst.num_actions());
    r.add("horizon", inst.horizon);
    r.add("mode", mode_name(inst.mode));
    r.add("budget", inst.budget);
    r.add("seed", static_cast<std::int64_t>(seed));
    emit(r, json);
    return 0;
}

std::pair<int, int> parse_cell(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::runtime_error("expected 'x,y' but got '" + s + "'");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon (chance-)constrained MDP approximation solver"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* cmd_solve = app.add_subcommand(
        "solve", "Solve an instance and write the policy (exit 0 feasible, 2 infeasible)");
    add_solve_flags(cmd_solve, solve_args, false);

    VerifyArgs verify_args;
    CLI::App* cmd_verify =
        app.add_subcommand("verify", "Evaluate a policy file against an instance");
    cmd_verify->add_option("instance", verify_args.instance_path, "Instance file")->required();
    cmd_verify->add_option("policy", verify_args.policy_path, "Policy file")->required();
    cmd_verify->add_option("--simulate", verify_args.simulate,
                           "Also Monte Carlo estimate with this many samples");
    cmd_verify->add_option("--seed", verify_args.seed, "Simulation seed")->capture_default_str();
    cmd_verify->add_option("--threads", verify_args.threads, "Simulation worker threads")
        ->capture_default_str();
    cmd_verify->add_flag("--json", verify_args.json, "Emit the report as JSON");

    SolveArgs compare_args;
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "Solve and compare against the exhaustive reference optimum");
    add_solve_flags(cmd_compare, compare_args, true);

    CLI::App* cmd_generate = app.add_subcommand("generate", "Write a random instance file");
    cmd_generate->require_subcommand(1);

    LayeredArgs lay;
    CLI::App* cmd_layered =
        cmd_generate->add_subcommand("layered", "Layered instance with controlled structure");
    cmd_layered->add_option("out", lay.out_path, "Output instance path")->required();
    cmd_layered->add_option("--states", lay.p.n_states_per_level, "States per level")
        ->capture_default_str();
    cmd_layered->add_option("--actions", lay.p.n_actions, "Actions")->capture_default_str();
    cmd_layered->add_option("--horizon", lay.p.horizon, "Horizon")->capture_default_str();
    cmd_layered->add_option("--gamma", lay.p.gamma_target, "Max successors per action")
        ->capture_default_str();
    cmd_layered->add_option("--cluster", lay.p.cluster_target,
                            "Max size of same-level groups with shared futures")
        ->capture_default_str();
    cmd_layered->add_option("--risk-lo", lay.p.risk_lo, "Lower risk/cost bound")
        ->capture_default_str();
    cmd_layered->add_option("--risk-hi", lay.p.risk_hi, "Upper risk/cost bound")
        ->capture_default_str();
    cmd_layered->add_option("--utility-lo", lay.p.utility_lo, "Lower utility bound")
        ->capture_default_str();
    cmd_layered->add_option("--utility-hi", lay.p.utility_hi, "Upper utility bound")
        ->capture_default_str();
    cmd_layered->add_option("--budget", lay.p.budget, "Risk or cost budget")
        ->capture_default_str();
    cmd_layered->add_option("--mode", lay.mode, "cc or cost")
        ->check(CLI::IsMember({"cc", "cost"}))
        ->capture_default_str();
    cmd_layered->add_option("--seed", lay.p.seed, "Generator seed")->capture_default_str();
    cmd_layered->add_flag("--json", lay.json, "Emit the report as JSON");

    GridworldArgs grid;
    CLI::App* cmd_grid =
        cmd_generate->add_subcommand("gridworld", "Cliff-walk navigation instance");
    cmd_grid->add_option("out", grid.out_path, "Output instance path")->required();
    std::string start_cell = "0,0", goal_cell = "2,2";
    cmd_grid->add_option("--width", grid.p.width, "Grid width")->capture_default_str();
    cmd_grid->add_option("--height", grid.p.height, "Grid height")->capture_default_str();
    cmd_grid->add_option("--start", start_cell, "Start cell as x,y")->capture_default_str();
    cmd_grid->add_option("--goal", goal_cell, "Goal cell as x,y")->capture_default_str();
    cmd_grid->add_option("--cliff", grid.cliffs, "Cliff cell as x,y (repeatable)");
    cmd_grid->add_option("--cliff-risk", grid.p.cliff_risk, "Failure chance on a cliff cell")
        ->capture_default_str();
    cmd_grid->add_option("--slip", grid.p.slip, "Slip probability")->capture_default_str();
    cmd_grid->add_option("--horizon", grid.p.horizon, "Horizon")->capture_default_str();
    cmd_grid->add_option("--budget", grid.p.budget, "Risk budget")->capture_default_str();
    cmd_grid->add_option("--seed", grid.p.seed, "Accepted for uniformity")
        ->capture_default_str();
    cmd_grid->add_flag("--json", grid.json, "Emit the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_solve->parsed()) return run_solve(solve_args, false);
        if (cmd_verify->parsed()) return run_verify(verify_args);
        if (cmd_compare->parsed()) return run_solve(compare_args, true);
        if (cmd_layered->parsed()) {
            lay.p.mode = parse_mode(lay.mode);
            return emit_generated(generate_layered(lay.p), lay.out_path, lay.p.seed, lay.json);
        }
        if (cmd_grid->parsed()) {
            grid.p.start = parse_cell(start_cell);
            grid.p.goal = parse_cell(goal_cell);
            for (const std::string& c : grid.cliffs) grid.p.cliffs.push_back(parse_cell(c));
            return emit_generated(generate_gridworld(grid.p), grid.out_path, grid.p.seed,
                                  grid.json);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
