#pragma once

// Brute force for the lot-sizing models: every order pattern, and for each
// pattern a dynamic program over order-up-to levels in cumulative
// coordinates (level plus mean demand of earlier periods) on the union of
// all kinks and a 0.25 grid. Per pattern the cost is convex in each level,
// so the optimum sits on a kink, and off-grid first levels are evaluated
// exactly by recursion.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "sslot/model.hpp"

namespace oracle {

struct Case {
    sslot::Instance inst;
    sslot::LossTable losses;
};

inline Case random_case(std::mt19937 &rng, int T) {
    std::uniform_real_distribution<double> mean(5.0, 60.0), cv(0.05, 0.35), K(10.0, 250.0),
        b(2.0, 20.0), c(0.0, 1.0), h(0.5, 2.0);
    std::vector<double> means;
    for (int t = 0; t < T; ++t) means.push_back(std::round(mean(rng)));
    sslot::CostParameters k;
    k.fixed_ordering = std::round(K(rng));
    k.unit = rng() % 2 ? 0.0 : c(rng);
    k.holding = h(rng);
    k.penalty = std::round(b(rng));
    Case out;
    out.inst = sslot::make_instance(k, means, cv(rng));
    std::uniform_int_distribution<int> cells(2, 10);
    out.losses = sslot::make_loss_table(out.inst, sslot::make_partition(cells(rng)));
    return out;
}

class BruteForce {
  public:
    explicit BruteForce(const Case &c) : c_(c) {
        const auto &inst = c.inst;
        T_ = inst.horizon();
        prefix_.assign(T_ + 1, 0.0);
        for (int t = 0; t < T_; ++t) prefix_[t + 1] = prefix_[t] + inst.demands[t].mean;
        for (int t = 0; t < T_; ++t) {
            for (int j = 0; j <= t; ++j) {
                const auto &pl = c.losses[t][j];
                const auto a = pl.intercepts();
                for (std::size_t i = 0; i + 1 < a.size(); ++i) {
                    levels_.push_back((a[i] - a[i + 1]) / (pl.slopes[i + 1] - pl.slopes[i]) +
                                      prefix_[j]);
                }
            }
        }
        const double span = prefix_[T_] + 10.0 * inst.summed_std_dev() +
                            inst.costs.fixed_ordering / inst.costs.penalty + 50.0;
        for (double z = -span; z <= span + prefix_[T_]; z += 0.25) levels_.push_back(z);
        std::sort(levels_.begin(), levels_.end());
        levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());

        for (int mask = 0; mask < 1 << (T_ - 1); ++mask) {
            Pattern p;
            p.starts.push_back(0);
            for (int t = 1; t < T_; ++t) {
                if (mask >> (t - 1) & 1) p.starts.push_back(t);
            }
            const int m = static_cast<int>(p.starts.size());
            p.tail.assign(m, std::vector<double>(levels_.size(), 0.0));
            // tail[q][i]: best cost of cycles q.. when cycle q may sit at any
            // level >= levels_[i]; the unit cost contributes c * z_last.
            for (int q = m - 1; q >= 0; --q) {
                double running = std::numeric_limits<double>::infinity();
                for (int i = static_cast<int>(levels_.size()) - 1; i >= 0; --i) {
                    running = std::min(running, at_level(p, q, levels_[i], i));
                    p.tail[q][i] = running;
                }
            }
            patterns_.push_back(std::move(p));
        }
    }

    /// Expected holding and penalty of periods j..e when period j starts at
    /// level y.
    double cycle_cost(int j, int e, double y) const {
        const auto &k = c_.inst.costs;
        double total = 0.0;
        for (int t = j; t <= e; ++t) {
            const auto &pl = c_.losses[t][j];
            const auto a = pl.intercepts();
            double u = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < a.size(); ++i) u = std::max(u, pl.slopes[i] * y + a[i]);
            total += k.holding * u + k.penalty * (u - (y - (prefix_[t + 1] - prefix_[j])));
        }
        return total;
    }

    /// Model cost with the first cycle at level y (I_0 = y), with or
    /// without a first-period order.
    double cost_at(double y, bool first_order) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &p : patterns_) best = std::min(best, exact(p, 0, y));
        return best + offset(first_order, y);
    }

    /// Minimum over I_0 and its smallest minimiser.
    std::pair<double, double> minimum(bool first_order) const {
        double arg = 0.0, val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            double v = std::numeric_limits<double>::infinity();
            for (const auto &p : patterns_) {
                v = std::min(v, at_level(p, 0, levels_[i], static_cast<int>(i)));
            }
            v += offset(first_order, levels_[i]);
            if (v < val - 1e-12) val = v, arg = levels_[i];
        }
        return {arg, val};
    }

    /// Largest y <= upper with cost_at(y, false) = target: a 0.25 scan down
    /// from upper, then bisection.
    double largest_root(double upper, double target) const {
        double hi = upper, lo = upper;
        while (cost_at(lo, false) < target) {
            hi = lo;
            lo -= 0.25;
        }
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cost_at(mid, false) < target ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }

  private:
    struct Pattern {
        std::vector<int> starts;
        std::vector<std::vector<double>> tail;
    };

    int end_of(const Pattern &p, int q) const {
        return q + 1 < static_cast<int>(p.starts.size()) ? p.starts[q + 1] - 1 : T_ - 1;
    }

    // Orders after the first period, the fixed cost of a first order, and
    // -c * I_0.
    double offset(bool first_order, double y) const {
        const auto &k = c_.inst.costs;
        return (first_order ? k.fixed_ordering : 0.0) - k.unit * y;
    }

    // Cost of cycles q.. with cycle q exactly at levels_[i] = z.
    double at_level(const Pattern &p, int q, double z, int i) const {
        const auto &k = c_.inst.costs;
        const int m = static_cast<int>(p.starts.size());
        const double here = cycle_cost(p.starts[q], end_of(p, q), z - prefix_[p.starts[q]]);
        if (q + 1 == m) return here + k.unit * z;
        return here + k.fixed_ordering + p.tail[q + 1][i];
    }

    // Same for an arbitrary z: the next level is z itself or a grid level
    // above it.
    double exact(const Pattern &p, int q, double z) const {
        const auto &k = c_.inst.costs;
        const int m = static_cast<int>(p.starts.size());
        const double here = cycle_cost(p.starts[q], end_of(p, q), z - prefix_[p.starts[q]]);
        if (q + 1 == m) return here + k.unit * z;
        const auto it = std::lower_bound(levels_.begin(), levels_.end(), z);
        double next = exact(p, q + 1, z);
        if (it != levels_.end()) next = std::min(next, p.tail[q + 1][it - levels_.begin()]);
        return here + k.fixed_ordering + next;
    }

    const Case &c_;
    int T_ = 0;
    std::vector<double> prefix_;
    std::vector<double> levels_;
    std::vector<Pattern> patterns_;
};

}  // namespace oracle
