#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sslot/core.hpp"
#include "sslot/heuristics.hpp"
#include "sslot/sdp.hpp"
#include "sslot/simulator.hpp"
#include "sslot/testbed.hpp"

namespace {

using namespace sslot;

constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kSolver = 4;

struct SdpArgs {
    std::string instance;
    double grid_step = 1.0;
    std::string dump_g;
    std::string policy_out;
};

struct SolveArgs {
    std::string instance;
    std::string method;
    int segments = 11;
    std::optional<double> step;
    std::string strategy = "minimax";
    std::string backend = "exact";
    std::string out;
    std::string out_dir = "lp";
};

struct SimulateArgs {
    std::string instance;
    std::string policy;
    long replications = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<double> oracle;
    std::string id;
    std::string method = "policy";
};

struct BenchmarkArgs {
    std::string config;
    std::uint64_t seed = 0;
    std::vector<std::string> patterns;
    std::vector<double> fixed_costs;
    std::vector<std::string> methods;
    std::optional<long> replications;
    int jobs = 1;
    std::string detail = "benchmark_detail.csv";
    std::string summary = "benchmark_summary.csv";
    bool allow_long = false;
    bool quiet = false;
};

std::string num(double v, const char *spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

int run_sdp(const SdpArgs &a) {
    const auto instance = read_instance(a.instance);
    const auto sol = solve_sdp(instance, a.grid_step, 4);
    const auto &g = sol.grid;
    std::cout << "grid " << num(g.lower, "%g") << " .. " << num(g.upper, "%g") << " step "
              << num(g.step, "%g") << "\n";
    std::cout << "t,s_t,S_t,G_t(S_t),K+G_t(S_t),indifference\n";
    for (int t = 1; t <= sol.horizon(); ++t) {
        const double S = sol.policy.order_up_to[t - 1];
        const double gs = scarf_g(sol, t, S);
        std::cout << t << ',' << num(sol.policy.reorder_points[t - 1], "%g") << ','
                  << num(S, "%g") << ',' << num(gs) << ',' << num(gs + sol.fixed_ordering)
                  << ',' << num(sol.indifference_points[t - 1]) << "\n";
    }
    std::cout << "expected cost C_1(" << num(instance.initial_inventory, "%g")
              << ") = " << num(sol.expected_cost) << "\n";
    if (!a.dump_g.empty()) write_g_csv(sol, a.dump_g);
    if (!a.policy_out.empty()) {
        std::vector<double> linked;
        for (int t = 1; t <= sol.horizon(); ++t) {
            linked.push_back(sol.fixed_ordering +
                             scarf_g(sol, t, sol.policy.order_up_to[t - 1]));
        }
        write_policy_csv(sol.policy, linked, a.policy_out);
    }
    return 0;
}

int run_solve(const SolveArgs &a) {
    const auto instance = read_instance(a.instance);
    const Method method = parse_method(a.method);
    HeuristicConfig config = default_config(instance.horizon());
    config.segments = a.segments;
    if (a.step) config.step = *a.step;
    config.strategy = a.strategy == "equal" ? PartitionStrategy::equal_probability
                                            : PartitionStrategy::minimax;
    if (a.backend == "lp-export") {
        const auto files = export_suffix_models(instance, config, method, a.out_dir);
        for (const auto &f : files) std::cout << f.string() << "\n";
        return 0;
    }
    const auto res = method == Method::mp ? mp_policy(instance, config)
                                          : bs_policy(instance, config);
    for (std::size_t k = 0; k < res.periods.size(); ++k) {
        const auto &p = res.periods[k];
        if (p.approximate) {
            std::cerr << "note: period " << k + 1
                      << " reorder point is the midpoint of the final bisection bracket\n";
        }
        if (p.link_roots > 1) {
            std::cerr << "note: period " << k + 1 << " has " << p.link_roots
                      << " separate roots of the linking equation\n";
        }
    }
    if (a.out.empty()) {
        std::cout << "t,s_t,S_t,linked_cost\n";
        const auto linked = res.linked_costs();
        for (int t = 0; t < res.policy.horizon(); ++t) {
            std::cout << t + 1 << ',' << num(res.policy.reorder_points[t], "%.6f") << ','
                      << num(res.policy.order_up_to[t], "%.6f") << ','
                      << num(linked[t], "%.6f") << "\n";
        }
    } else {
        write_policy_csv(res.policy, res.linked_costs(), a.out);
    }
    return 0;
}

int run_simulate(const SimulateArgs &a) {
    const auto instance = read_instance(a.instance);
    const auto policy = read_policy_csv(a.policy);
    SimulationOptions options;
    options.replications = a.replications;
    options.seed = a.seed;
    options.threads = a.threads;
    SimulationRow row;
    row.instance_id = a.id.empty() ? std::filesystem::path(a.instance).stem().string() : a.id;
    row.method = a.method;
    if (a.oracle) {
        const auto gap = estimate_gap(instance, policy, *a.oracle, options);
        row.result = gap.simulation;
        row.gap_pct = gap.gap_pct;
    } else {
        row.result = simulate_policy(instance, policy, options);
    }
    if (!row.result.stderr_defined) {
        std::cerr << "note: one replication, standard error undefined (reported as 0)\n";
    }
    if (row.result.truncated_fraction > 0.0) {
        std::cerr << "note: " << num(100.0 * row.result.truncated_fraction, "%.4f")
                  << "% of demand draws were negative and set to 0\n";
    }
    std::cout << kSimulationCsvHeader << "\n";
    write_simulation_row(std::cout, row);
    return 0;
}

int run_benchmark_cmd(const BenchmarkArgs &a) {
    BenchmarkConfig config = read_benchmark_config(a.config);
    config.seed = a.seed;
    if (!a.patterns.empty()) {
        config.patterns.clear();
        for (const auto &p : a.patterns) config.patterns.push_back(parse_pattern(p));
    }
    if (!a.fixed_costs.empty()) config.fixed_costs = a.fixed_costs;
    if (!a.methods.empty()) {
        config.methods.clear();
        for (const auto &m : a.methods) config.methods.push_back(parse_method(m));
    }
    if (a.replications) config.replications = *a.replications;
    config.jobs = a.jobs;
    if (a.allow_long) config.allow_long = true;
    const auto report = run_benchmark(config, a.detail, a.summary, [&](const DetailRow &r) {
        if (a.quiet) return;
        std::cerr << r.instance_id << ' ' << r.method << ' '
                  << (r.ok ? (r.gap_pct ? num(*r.gap_pct) + "%" : num(r.mean)) : "failed: " + r.message)
                  << "\n";
    });
    if (report.resumed > 0) {
        std::cerr << "resumed " << report.resumed << " rows from " << a.detail << "\n";
    }
    std::cout << kSummaryCsvHeader << "\n";
    for (const auto &s : report.summary) {
        std::cout << s.group << ',' << s.key << ',' << s.method << ',' << s.instances << ','
                  << s.failures << ',' << (s.mean_gap_pct ? num(*s.mean_gap_pct, "%.6f") : "")
                  << ',' << num(s.mean_cost, "%.6f") << ',' << num(s.mean_seconds, "%.3f")
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"(s,S) inventory policies: SDP oracle, MILP heuristics, simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "sslot 0.1.0");

    SdpArgs sdp;
    auto *sdp_cmd = app.add_subcommand("sdp", "Optimal policy by stochastic dynamic programming");
    sdp_cmd->add_option("instance", sdp.instance, "Instance JSON file")->required();
    sdp_cmd->add_option("--grid-step", sdp.grid_step, "Inventory grid step")
        ->check(CLI::PositiveNumber);
    sdp_cmd->add_option("--dump-g", sdp.dump_g, "Write G_t(y) for every grid point (CSV)");
    sdp_cmd->add_option("--policy-out", sdp.policy_out, "Write the policy CSV");

    SolveArgs solve;
    auto *solve_cmd = app.add_subcommand("solve", "Heuristic policy from the MILP models");
    solve_cmd->add_option("instance", solve.instance, "Instance JSON file")->required();
    solve_cmd->add_option("--method", solve.method, "mp or bs")
        ->required()
        ->check(CLI::IsMember({"mp", "bs", "MP", "BS"}));
    solve_cmd->add_option("--segments", solve.segments, "Linear pieces per loss function")
        ->check(CLI::Range(3, 1000));
    solve_cmd->add_option("--step", solve.step, "Binary search step")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--strategy", solve.strategy, "Partition: minimax or equal")
        ->check(CLI::IsMember({"minimax", "equal"}));
    solve_cmd->add_option("--backend", solve.backend, "exact or lp-export")
        ->check(CLI::IsMember({"exact", "lp-export"}));
    solve_cmd->add_option("--out", solve.out, "Policy CSV (default: stdout)");
    solve_cmd->add_option("--out-dir", solve.out_dir, "Directory for lp-export");

    SimulateArgs sim;
    auto *sim_cmd = app.add_subcommand("simulate", "Monte Carlo cost of a policy");
    sim_cmd->add_option("instance", sim.instance, "Instance JSON file")->required();
    sim_cmd->add_option("policy", sim.policy, "Policy CSV")->required();
    sim_cmd->add_option("--reps", sim.replications, "Replications")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Random seed")->required();
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--oracle", sim.oracle, "Optimal cost; adds gap_pct");
    sim_cmd->add_option("--id", sim.id, "instance_id column (default: file stem)");
    sim_cmd->add_option("--method", sim.method, "method column");

    BenchmarkArgs bench;
    auto *bench_cmd = app.add_subcommand("benchmark", "Optimality gaps over the test bed");
    bench_cmd->add_option("config", bench.config, "Benchmark config JSON")->required();
    bench_cmd->add_option("--seed", bench.seed, "Random seed")->required();
    bench_cmd->add_option("--patterns", bench.patterns, "Demand patterns")->delimiter(',');
    bench_cmd->add_option("--K", bench.fixed_costs, "Fixed ordering costs")->delimiter(',');
    bench_cmd->add_option("--methods", bench.methods, "mp, bs")->delimiter(',');
    bench_cmd->add_option("--reps", bench.replications, "Replications per instance");
    bench_cmd->add_option("--jobs", bench.jobs, "Instances solved in parallel")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--detail", bench.detail, "Per-instance CSV (resumed if present)");
    bench_cmd->add_option("--summary", bench.summary, "Summary CSV");
    bench_cmd->add_flag("--allow-long", bench.allow_long, "Permit 25-period configs");
    bench_cmd->add_flag("--quiet", bench.quiet, "No per-instance progress");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*sdp_cmd) return run_sdp(sdp);
        if (*solve_cmd) return run_solve(solve);
        if (*sim_cmd) return run_simulate(sim);
        if (*bench_cmd) return run_benchmark_cmd(bench);
    } catch (const SolverError &e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolver;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
