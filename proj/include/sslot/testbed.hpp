#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sslot/core.hpp"
#include "sslot/heuristics.hpp"

namespace sslot {

enum class Pattern { LCY1, LCY2, SIN1, SIN2, STA, RAND, EMP1, EMP2, EMP3, EMP4 };

const std::vector<Pattern> &all_patterns();
const char *to_string(Pattern pattern);
Pattern parse_pattern(const std::string &name);

/// Mean demand per period. Horizon 8 uses the tabulated values; horizon 25
/// generates LCY, SIN and STA from their closed forms and tabulates RAND and
/// EMP.
std::vector<double> demand_means(Pattern pattern, int horizon);

/// Columns of a pattern file (`horizon,t,LCY1,...,EMP4`) keyed by horizon.
using PatternTable = std::map<int, std::map<Pattern, std::vector<double>>>;
PatternTable read_pattern_table(const std::filesystem::path &path);

struct BenchmarkConfig {
    int horizon = 8;
    std::vector<Pattern> patterns = all_patterns();
    std::vector<double> fixed_costs{200.0, 300.0, 400.0};
    std::vector<double> penalties{5.0, 10.0, 20.0};
    std::vector<double> cvs{0.1, 0.2, 0.3};
    double holding = 1.0;
    double unit = 0.0;
    double initial_inventory = 0.0;
    std::vector<Method> methods{Method::bs};
    long replications = 10000;
    std::uint64_t seed = 0;
    HeuristicConfig heuristic;
    /// Inventory grid step of the SDP oracle; a unit step is too coarse for
    /// the smallest standard deviations (0.2).
    double grid_step = 0.1;
    int jobs = 1;
    /// Horizon 25 runs take long and have no oracle; they must be asked for.
    bool allow_long = false;
};

/// Standard grids: 8 periods with K in {200, 300, 400} and 10^4 replications,
/// or 25 periods with K in {500, 1000, 1500} and 10^6 replications.
BenchmarkConfig default_benchmark_config(int horizon);
void validate(const BenchmarkConfig &config);

/// JSON object with optional keys horizon, patterns, K, b, cv, h, c, I0,
/// methods, replications, seed, segments, step, grid_step, jobs,
/// allow_long. Missing keys keep the defaults for the horizon.
BenchmarkConfig parse_benchmark_config(const std::string &text);
BenchmarkConfig read_benchmark_config(const std::filesystem::path &path);

struct BenchmarkInstance {
    std::string id;
    Pattern pattern = Pattern::STA;
    double fixed_cost = 0.0;
    double penalty = 0.0;
    double cv = 0.0;
    Instance instance;
};

std::string instance_id(Pattern pattern, double K, double b, double cv, int horizon);

/// Cross product pattern x K x b x cv in that nesting order.
std::vector<BenchmarkInstance> build_instances(const BenchmarkConfig &config);

struct DetailRow {
    std::string instance_id;
    std::string pattern;
    int horizon = 0;
    double fixed_cost = 0.0;
    double penalty = 0.0;
    double cv = 0.0;
    std::string method;
    bool ok = false;
    double reorder_point = 0.0;  // s_1
    double order_up_to = 0.0;    // S_1
    /// Linearised model cost of period 1.
    double model_cost = 0.0;
    std::optional<double> oracle_cost;
    double mean = 0.0;
    double std_error = 0.0;
    long replications = 0;
    std::uint64_t seed = 0;
    std::optional<double> gap_pct;
    double truncated_fraction = 0.0;
    double seconds = 0.0;
    std::string message;
};

inline constexpr const char *kDetailCsvHeader =
    "instance_id,pattern,horizon,K,b,cv,method,status,s_1,S_1,model_cost,oracle_cost,mean,"
    "stderr,replications,seed,gap_pct,truncated,seconds,message";

std::string format_detail_row(const DetailRow &row);
DetailRow parse_detail_row(const std::string &line);

struct SummaryRow {
    /// pattern, K, b, cv or overall.
    std::string group;
    std::string key;
    std::string method;
    int instances = 0;
    int failures = 0;
    /// Mean of the per-instance gaps; empty without an oracle.
    std::optional<double> mean_gap_pct;
    double mean_cost = 0.0;
    double mean_seconds = 0.0;
};

inline constexpr const char *kSummaryCsvHeader =
    "group,key,method,instances,failures,mean_gap_pct,mean_cost,mean_seconds";

/// Groups in the order pattern, K, b, cv, overall; keys in order of first
/// appearance. Failed rows count as failures and are left out of the means.
std::vector<SummaryRow> summarize(const std::vector<DetailRow> &rows);

struct BenchmarkReport {
    std::vector<DetailRow> detail;
    std::vector<SummaryRow> summary;
    /// Rows taken over from an existing detail file.
    int resumed = 0;
};

using BenchmarkProgress = std::function<void(const DetailRow &)>;

/// Seed of the simulation for one instance; all methods share it.
std::uint64_t instance_seed(std::uint64_t seed, const std::string &id);

/// Runs every method on every instance. Rows already present in
/// `detail_path` are kept and not recomputed; new rows are appended as they
/// finish. At the end the detail file is rewritten in instance order and the
/// summary file is written.
BenchmarkReport run_benchmark(const BenchmarkConfig &config,
                              const std::filesystem::path &detail_path,
                              const std::filesystem::path &summary_path,
                              const BenchmarkProgress &progress = {});

}  // namespace sslot
