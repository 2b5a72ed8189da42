#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sslot/core.hpp"

namespace sslot {

struct SimulationResult {
    double mean = 0.0;
    /// Sample standard deviation (n - 1) over sqrt(n); 0 when n = 1.
    double std_error = 0.0;
    long replications = 0;
    std::uint64_t seed = 0;
    /// False for a single replication, where the standard error is undefined.
    bool stderr_defined = false;
    /// Fraction of demand draws that came out negative and were set to 0.
    double truncated_fraction = 0.0;
    double initial_inventory = 0.0;
};

struct SimulationOptions {
    long replications = 10000;
    std::uint64_t seed = 0;
    /// Worker threads; 0 uses the hardware concurrency. Results do not
    /// depend on this.
    int threads = 1;
};

/// Seed of replication `rep` under base seed `seed` (splitmix64 mix).
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep);

/// Cost of a single replication with its own demand stream.
double simulate_once(const Instance &instance, const PolicyParameters &policy,
                     std::uint64_t rep_seed, long *truncated = nullptr);

SimulationResult simulate_policy(const Instance &instance, const PolicyParameters &policy,
                                 const SimulationOptions &options);

struct GapEstimate {
    /// 100 (mean - oracle) / oracle.
    double gap_pct = 0.0;
    /// Standard error of gap_pct.
    double stderr_pct = 0.0;
    double oracle_cost = 0.0;
    SimulationResult simulation;
};

GapEstimate estimate_gap(const Instance &instance, const PolicyParameters &policy,
                         double oracle_cost, const SimulationOptions &options);

struct SimulationRow {
    std::string instance_id;
    std::string method;
    SimulationResult result;
    std::optional<double> gap_pct;
};

inline constexpr const char *kSimulationCsvHeader =
    "instance_id,method,mean,stderr,replications,seed,gap_pct";

void write_simulation_row(std::ostream &os, const SimulationRow &row);

}  // namespace sslot
