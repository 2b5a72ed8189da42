#include "sslot/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "sslot/loss.hpp"

namespace sslot {

namespace {

struct DiscreteDemand {
    int first = 0;  // demand of cell k is (first + k) * step
    std::vector<double> mass;
};

DiscreteDemand discretise(const NormalDemand &d, double step, double truncation) {
    DiscreteDemand out;
    if (d.std_dev == 0.0) {
        out.first = static_cast<int>(std::lround(std::max(d.mean, 0.0) / step));
        out.mass = {1.0};
        return out;
    }
    const double z = normal_quantile(truncation);
    const double lo = d.mean - z * d.std_dev;
    const double hi = d.mean + z * d.std_dev;
    const int k_lo = static_cast<int>(std::lround(lo / step));
    const int k_hi = static_cast<int>(std::lround(hi / step));
    out.first = std::max(k_lo, 0);
    out.mass.assign(k_hi - out.first + 1, 0.0);
    double total = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double a = std::max((k - 0.5) * step, lo);
        const double b = std::min((k + 0.5) * step, hi);
        const double m = normal_cdf((b - d.mean) / d.std_dev) - normal_cdf((a - d.mean) / d.std_dev);
        // Negative demand is not observed; fold it into zero.
        out.mass[std::max(k, 0) - out.first] += m;
        total += m;
    }
    for (double &m : out.mass) m /= total;
    return out;
}

}  // namespace

int InventoryGrid::size() const {
    return static_cast<int>(std::lround((upper - lower) / step)) + 1;
}

int InventoryGrid::index_of(double y) const {
    const double r = (y - lower) / step;
    const long i = std::lround(r);
    if (std::abs(r - static_cast<double>(i)) > 1e-9 || i < 0 || i >= size()) return -1;
    return static_cast<int>(i);
}

void validate(const InventoryGrid &grid) {
    if (!(grid.step > 0.0)) throw ValidationError("grid: step must be positive");
    if (!(grid.lower < grid.upper)) throw ValidationError("grid: lower bound must be below upper");
    const double r = (grid.upper - grid.lower) / grid.step;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
        throw ValidationError("grid: (upper - lower) / step is not an integer");
    }
}

InventoryGrid default_grid(const Instance &instance, double step) {
    if (!(step > 0.0)) throw ValidationError("grid: step must be positive");
    const double spread = 4.0 * instance.summed_std_dev();
    const double i0 = instance.initial_inventory;
    // Ordering never pays while the extra shortage costs less than K.
    const auto &k = instance.costs;
    const double reach = k.penalty > 0.0 ? k.fixed_ordering / k.penalty : 0.0;
    const double raw_lo = -spread - reach + std::min(0.0, i0);
    const double raw_hi = std::max(instance.total_mean() + spread, i0 + step);
    InventoryGrid grid;
    grid.step = step;
    grid.lower = i0 - step * std::ceil((i0 - raw_lo) / step);
    grid.upper = i0 + step * std::ceil((raw_hi - i0) / step);
    if (grid.upper <= grid.lower) grid.upper = grid.lower + step;
    return grid;
}

SdpSolution solve_sdp(const Instance &instance, const InventoryGrid &grid, double truncation) {
    validate(instance);
    validate(grid);
    if (!(truncation > 0.99 && truncation < 1.0)) {
        throw ValidationError("demand truncation quantile must lie in (0.99, 1)");
    }
    const int T = instance.horizon();
    const int n = grid.size();
    const auto &k = instance.costs;
    const int i0 = grid.index_of(instance.initial_inventory);
    if (i0 < 0) throw ValidationError("initial inventory is not a grid point");

    SdpSolution sol;
    sol.grid = grid;
    sol.fixed_ordering = k.fixed_ordering;
    sol.unit_cost = k.unit;
    sol.initial_inventory = instance.initial_inventory;
    sol.g.assign(T, std::vector<double>(n));
    sol.c.assign(T, std::vector<double>(n));
    sol.policy.reorder_points.assign(T, 0.0);
    sol.policy.order_up_to.assign(T, 0.0);
    sol.indifference_points.assign(T, 0.0);

    // Next-period value C_{t+1}; below the grid the ordering branch is linear.
    std::vector<double> next(n, 0.0);
    double next_order_level = 0.0;  // K + min G_{t+1}
    bool last = true;
    auto next_value = [&](int j) {
        if (last) return 0.0;
        if (j >= 0) return next[j];
        return next_order_level - k.unit * grid.at(j);
    };

    for (int t = T - 1; t >= 0; --t) {
        const auto demand = discretise(instance.demands[t], grid.step, truncation);
        const auto &d = instance.demands[t];
        auto &g = sol.g[t];
        for (int i = 0; i < n; ++i) {
            const double y = grid.at(i);
            // The immediate cost uses the exact normal expectation; only the
            // transition needs the discretised demand.
            const double immediate = k.holding * complementary_loss(y, d.mean, d.std_dev) +
                                     k.penalty * loss(y, d.mean, d.std_dev);
            double future = 0.0;
            if (!last) {
                for (std::size_t m = 0; m < demand.mass.size(); ++m) {
                    const int shift = demand.first + static_cast<int>(m);
                    future += demand.mass[m] * next_value(i - shift);
                }
            }
            g[i] = k.unit * y + immediate + future;
        }

        const int s_idx = static_cast<int>(std::min_element(g.begin(), g.end()) - g.begin());
        if (s_idx == n - 1) {
            throw GridBoundError("grid too small: order-up-to level of period " +
                                     std::to_string(t + 1) + " sits on the upper bound " +
                                     std::to_string(grid.upper),
                                 false);
        }
        const double order_level = k.fixed_ordering + g[s_idx];
        int r_idx = -1;
        for (int i = s_idx; i >= 0; --i) {
            if (g[i] >= order_level) {
                r_idx = i;
                break;
            }
        }
        if (r_idx < 0 || g[0] < order_level) {
            throw GridBoundError("grid too small: reorder point of period " +
                                     std::to_string(t + 1) + " lies below the lower bound " +
                                     std::to_string(grid.lower),
                                 true);
        }
        sol.policy.order_up_to[t] = grid.at(s_idx);
        sol.policy.reorder_points[t] = grid.at(r_idx);
        double root = grid.at(r_idx);
        if (r_idx < s_idx && g[r_idx] > g[r_idx + 1]) {
            root += grid.step * (g[r_idx] - order_level) / (g[r_idx] - g[r_idx + 1]);
        }
        sol.indifference_points[t] = root;

        // C_t(x) = min(G_t(x), K + min_{y>=x} G_t(y)) - c x.
        auto &c = sol.c[t];
        double suffix_min = std::numeric_limits<double>::infinity();
        for (int i = n - 1; i >= 0; --i) {
            suffix_min = std::min(suffix_min, g[i]);
            c[i] = std::min(g[i], k.fixed_ordering + suffix_min) - k.unit * grid.at(i);
        }
        next = c;
        next_order_level = order_level;
        last = false;
    }
    sol.expected_cost = sol.c[0][i0];
    return sol;
}

SdpSolution solve_sdp(const Instance &instance, double step, int extensions) {
    InventoryGrid grid = default_grid(instance, step);
    for (int attempt = 0;; ++attempt) {
        try {
            return solve_sdp(instance, grid);
        } catch (const GridBoundError &e) {
            if (attempt >= extensions) throw;
            const double span = grid.upper - grid.lower;
            if (e.lower_bound()) {
                grid.lower -= span;
            } else {
                grid.upper += span;
            }
        }
    }
}

SdpSolution solve_sdp(const Instance &instance) { return solve_sdp(instance, 1.0, 4); }

double scarf_g(const SdpSolution &solution, int t, double y) {
    if (t < 1 || t > solution.horizon()) {
        throw ValidationError("scarf_g: period " + std::to_string(t) + " outside 1.." +
                              std::to_string(solution.horizon()));
    }
    const int i = solution.grid.index_of(y);
    if (i < 0) throw ValidationError("scarf_g: inventory level is not a grid point");
    return solution.g[t - 1][i];
}

PolicyParameters extract_policy(const SdpSolution &solution) { return solution.policy; }

KConvexityCheck check_k_convexity(std::span<const double> values, double step, double K,
                                  double tolerance) {
    KConvexityCheck out;
    const int n = static_cast<int>(values.size());
    for (int d = 1; d < n; d = d == 1 ? 2 : d * 2) {
        for (int i = d; i < n; ++i) {
            const double slope = (values[i] - values[i - d]) / (d * step);
            for (int a = 1; i + a < n; ++a) {
                const double gap = values[i] + a * step * slope - K - values[i + a];
                if (gap > tolerance * std::max(1.0, std::abs(values[i]))) {
                    out.ok = false;
                    out.y = i * step;
                    out.below = d * step;
                    out.above = a * step;
                    out.violation = gap;
                    return out;
                }
            }
        }
    }
    return out;
}

void write_g_csv(const SdpSolution &solution, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "t,y,G\n" << std::setprecision(12);
    for (int t = 0; t < solution.horizon(); ++t) {
        for (int i = 0; i < solution.grid.size(); ++i) {
            out << t + 1 << ',' << solution.grid.at(i) << ',' << solution.g[t][i] << '\n';
        }
    }
}

}  // namespace sslot
