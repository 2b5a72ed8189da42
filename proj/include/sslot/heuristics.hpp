#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sslot/core.hpp"
#include "sslot/loss.hpp"
#include "sslot/solver.hpp"

namespace sslot {

struct HeuristicConfig {
    /// Linear pieces of each loss approximation; the partition has
    /// segments - 1 cells.
    int segments = 11;
    PartitionStrategy strategy = PartitionStrategy::minimax;
    /// Binary search step.
    double step = 0.1;
    /// Suffixes k <= long_suffixes use long_step instead of step (0 = off).
    int long_suffixes = 0;
    double long_step = 1.0;
    /// Left end of the binary search; by default -(sum mean + 6 sqrt(sum var))
    /// of the suffix.
    std::optional<double> lower_bound;
    /// Times the lower bound may be pushed down when the cost there is
    /// still below K + G(S).
    int max_extensions = 30;
    /// Band around K + G(S) accepted as a root.
    double tolerance = 1e-4;
    SolveOptions solve;
};

void validate(const HeuristicConfig &config);

/// Step 0.1; horizons beyond 16 periods search the first 15
/// suffixes with step 1.
HeuristicConfig default_config(int horizon);

Partition heuristic_partition(const HeuristicConfig &config);

struct PeriodResult {
    double reorder_point = 0.0;
    double order_up_to = 0.0;
    /// G_k(s_k) of the suffix model, which should equal K + G_k(S_k).
    double linked_cost = 0.0;
    /// Minimum of the no-order suffix model, G_k(S_k).
    double base_cost = 0.0;
    /// Bisection midpoints evaluated.
    int evaluations = 0;
    /// Left end the bisection started from, and whether it had to be moved
    /// below the configured bound.
    double lower_bound = 0.0;
    bool extended = false;
    /// Binary search ended without meeting the tolerance band; the reorder
    /// point is the midpoint of the final bracket.
    bool approximate = false;
    int link_roots = 1;
    double seconds = 0.0;
};

struct HeuristicResult {
    PolicyParameters policy;
    std::vector<PeriodResult> periods;
    double seconds = 0.0;

    std::vector<double> linked_costs() const;
};

/// For every k solves the joint model on periods k..T.
HeuristicResult mp_policy(const Instance &instance, const HeuristicConfig &config);
/// For every k finds S_k from the no-order model with free I_0, then
/// bisects on I_0 for the point where the cost reaches K + G_k(S_k).
HeuristicResult bs_policy(const Instance &instance, const HeuristicConfig &config);

enum class Method { mp, bs };
const char *to_string(Method method);
Method parse_method(const std::string &name);

/// Writes the models a heuristic would solve first for every suffix
/// (joint_k.lp for MP, reorder_k.lp with free I_0 for BS). Returns the
/// paths written.
std::vector<std::filesystem::path> export_suffix_models(const Instance &instance,
                                                        const HeuristicConfig &config,
                                                        Method method,
                                                        const std::filesystem::path &dir);

}  // namespace sslot
