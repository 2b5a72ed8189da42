#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sslot/core.hpp"

namespace sslot {

/// Uniform grid of inventory levels lower, lower + step, ..., upper.
struct InventoryGrid {
    double lower = 0.0;
    double upper = 0.0;
    double step = 1.0;

    int size() const;
    double at(int i) const { return lower + step * i; }
    /// Index of grid point y, or -1 when y is not on the grid.
    int index_of(double y) const;
};

void validate(const InventoryGrid &grid);

/// [min(0, I0) - 4 * sum(sd) - K / b, sum(mean) + 4 * sum(sd)], shifted so
/// that the initial inventory is a grid point.
InventoryGrid default_grid(const Instance &instance, double step = 1.0);

/// The policy reaches the edge of the grid.
class GridBoundError : public SolverError {
  public:
    GridBoundError(const std::string &what, bool lower) : SolverError(what), lower_(lower) {}
    bool lower_bound() const { return lower_; }

  private:
    bool lower_;
};

struct SdpSolution {
    InventoryGrid grid;
    double fixed_ordering = 0.0;
    double unit_cost = 0.0;
    double initial_inventory = 0.0;
    /// g[t][i] = G_{t+1}(grid.at(i)), the cost of starting period t+1 at
    /// inventory y after ordering.
    std::vector<std::vector<double>> g;
    /// c[t][i] = C_{t+1}(grid.at(i)), optimal expected cost from period t+1.
    std::vector<std::vector<double>> c;
    PolicyParameters policy;
    /// Linear interpolation of the point where G_t crosses K + G_t(S_t)
    /// between s_t and the next grid point.
    std::vector<double> indifference_points;
    /// C_1(I_0).
    double expected_cost = 0.0;

    int horizon() const { return static_cast<int>(g.size()); }
};

/// Backward induction over the inventory grid. The expected holding and
/// penalty cost of a period is exact; the transition uses the period demand
/// discretised to grid steps: cell masses from the normal CDF between the
/// 1 - q and q quantiles, negative demand folded into zero, renormalised.
/// Throws GridBoundError when the optimal action touches the grid boundary.
SdpSolution solve_sdp(const Instance &instance, const InventoryGrid &grid,
                      double truncation_quantile = 0.9999);
/// Starts from default_grid(instance, step) and widens the grid by its own
/// span on the side the policy ran into, at most `extensions` times.
SdpSolution solve_sdp(const Instance &instance, double step, int extensions);
SdpSolution solve_sdp(const Instance &instance);

/// G_t(y) for t one based; y must be a grid point.
double scarf_g(const SdpSolution &solution, int t, double y);

/// S_t = smallest grid minimiser of G_t; s_t = largest grid point y <= S_t at
/// which ordering is at least as cheap as not ordering,
/// G_t(y) >= K + G_t(S_t).
PolicyParameters extract_policy(const SdpSolution &solution);

struct KConvexityCheck {
    bool ok = true;
    /// First violating triple y - below, y, y + above; y is measured from the
    /// first table entry.
    double y = 0.0;
    double below = 0.0;
    double above = 0.0;
    double violation = 0.0;
};

/// Discrete K-convexity on a uniform grid:
/// K + G(y + a) >= G(y) + a * (G(y) - G(y - d)) / d for all a, d > 0.
/// Every `a` is checked for d of one step; larger d use powers of two.
KConvexityCheck check_k_convexity(std::span<const double> values, double step, double K,
                                  double tolerance = 1e-9);

/// CSV `t,y,G` for every period and grid point.
void write_g_csv(const SdpSolution &solution, const std::filesystem::path &path);

}  // namespace sslot
