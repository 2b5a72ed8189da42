#include "sslot/heuristics.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sslot/model.hpp"

namespace sslot {

namespace {

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

SolveResult solve_or_throw(const MilpModel &model, const HeuristicConfig &config, int k) {
    SolveResult res = solve_exact(model, config.solve);
    if (res.status != SolveStatus::optimal) {
        throw SolverError("suffix " + std::to_string(k) + ": solver returned " +
                          to_string(res.status));
    }
    return res;
}

template <typename F>
auto for_suffix(int k, F &&f) {
    try {
        return f();
    } catch (const SolverError &e) {
        const std::string what = e.what();
        if (what.rfind("suffix ", 0) == 0) throw;
        throw SolverError("suffix " + std::to_string(k) + ": " + what);
    }
}

Instance suffix_of(const Instance &instance, int k) { return instance.suffix(k - 1, 0.0); }

PeriodResult binary_search(const Instance &suffix, const Partition &partition,
                           const HeuristicConfig &config, int k) {
    const auto start = std::chrono::steady_clock::now();
    const auto losses = make_loss_table(suffix, partition);
    MilpModel model = build_minlp_s(suffix, losses);
    const auto free = solve_or_throw(model, config, k);
    PeriodResult out;
    out.order_up_to = free.values[model.submodels.front().initial];
    out.base_cost = free.objective;
    const double K = suffix.costs.fixed_ordering;
    const double target = out.base_cost + K;

    auto cost_at = [&](double level) {
        fix_initial_inventory(model, level);
        return solve_or_throw(model, config, k).objective;
    };

    if (K <= config.tolerance) {
        out.reorder_point = out.order_up_to;
        out.linked_cost = out.base_cost;
        out.seconds = elapsed(start);
        return out;
    }

    const double step = k <= config.long_suffixes ? config.long_step : config.step;
    double first = config.lower_bound.value_or(
        -(suffix.total_mean() + 6.0 * suffix.pooled_std_dev()));
    if (first > out.order_up_to) first = out.order_up_to;
    // The cost grows without bound below zero stock, so moving the bound
    // down eventually brackets the root.
    double at_first = cost_at(first);
    for (int i = 0; at_first < target - config.tolerance; ++i) {
        if (i == config.max_extensions) {
            std::ostringstream msg;
            msg << "suffix " << k << ": binary search did not bracket the reorder point; final "
                << "bracket [" << first << ", " << out.order_up_to << "] still costs "
                << at_first << " < " << target << " at its lower end";
            throw SolverError(msg.str());
        }
        first -= std::max(out.order_up_to - first, 1.0);
        at_first = cost_at(first);
        out.extended = true;
    }
    out.lower_bound = first;

    double low = first;
    double high = out.order_up_to;
    bool found = false;
    while (low <= high) {
        const double mid = low + step * std::floor((high - low) / (2.0 * step));
        ++out.evaluations;
        const double diff = cost_at(mid) - target;
        if (std::abs(diff) <= config.tolerance) {
            out.reorder_point = mid;
            found = true;
            break;
        }
        if (diff < 0.0) {
            high = mid - step;
        } else {
            low = mid + step;
        }
    }
    if (!found) {
        out.reorder_point = 0.5 * (low + high);
        out.approximate = true;
    }
    out.linked_cost = cost_at(out.reorder_point);
    out.seconds = elapsed(start);
    return out;
}

}  // namespace

void validate(const HeuristicConfig &config) {
    if (config.segments < 3) {
        throw ValidationError("segments must be at least 3 (two cells)");
    }
    if (!(config.step > 0.0) || !(config.long_step > 0.0)) {
        throw ValidationError("binary search step must be positive");
    }
    if (!(config.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    if (config.long_suffixes < 0) throw ValidationError("long_suffixes must be non-negative");
    if (config.max_extensions < 0) throw ValidationError("max_extensions must be non-negative");
}

HeuristicConfig default_config(int horizon) {
    HeuristicConfig config;
    if (horizon > 16) {
        config.long_suffixes = 15;
        config.long_step = 1.0;
    }
    return config;
}

Partition heuristic_partition(const HeuristicConfig &config) {
    validate(config);
    return make_partition(config.segments - 1, config.strategy);
}

std::vector<double> HeuristicResult::linked_costs() const {
    std::vector<double> out;
    for (const auto &p : periods) out.push_back(p.linked_cost);
    return out;
}

HeuristicResult mp_policy(const Instance &instance, const HeuristicConfig &config) {
    validate(instance);
    const auto start = std::chrono::steady_clock::now();
    const auto partition = heuristic_partition(config);
    HeuristicResult out;
    for (int k = 1; k <= instance.horizon(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto period = for_suffix(k, [&] {
            const auto suffix = suffix_of(instance, k);
            const auto model = build_joint(suffix, make_loss_table(suffix, partition));
            const auto res = solve_or_throw(model, config, k);
            const auto joint = joint_solution(model, res);
            PeriodResult p;
            p.reorder_point = joint.reorder_point;
            p.order_up_to = joint.order_up_to;
            p.linked_cost = joint.linked_cost;
            p.base_cost = joint.linked_cost - suffix.costs.fixed_ordering;
            p.evaluations = 1;
            p.link_roots = joint.link_roots;
            return p;
        });
        out.periods.push_back(period);
        out.periods.back().seconds = elapsed(t0);
        out.policy.reorder_points.push_back(period.reorder_point);
        out.policy.order_up_to.push_back(period.order_up_to);
    }
    out.seconds = elapsed(start);
    return out;
}

HeuristicResult bs_policy(const Instance &instance, const HeuristicConfig &config) {
    validate(instance);
    const auto start = std::chrono::steady_clock::now();
    const auto partition = heuristic_partition(config);
    HeuristicResult out;
    for (int k = 1; k <= instance.horizon(); ++k) {
        const auto period =
            for_suffix(k, [&] { return binary_search(suffix_of(instance, k), partition, config, k); });
        out.periods.push_back(period);
        out.policy.reorder_points.push_back(period.reorder_point);
        out.policy.order_up_to.push_back(period.order_up_to);
    }
    out.seconds = elapsed(start);
    return out;
}

const char *to_string(Method method) { return method == Method::mp ? "mp" : "bs"; }

Method parse_method(const std::string &name) {
    if (name == "mp" || name == "MP") return Method::mp;
    if (name == "bs" || name == "BS") return Method::bs;
    throw ValidationError("unknown method '" + name + "' (expected mp or bs)");
}

std::vector<std::filesystem::path> export_suffix_models(const Instance &instance,
                                                        const HeuristicConfig &config,
                                                        Method method,
                                                        const std::filesystem::path &dir) {
    validate(instance);
    const auto partition = heuristic_partition(config);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (int k = 1; k <= instance.horizon(); ++k) {
        const auto suffix = suffix_of(instance, k);
        const auto losses = make_loss_table(suffix, partition);
        MilpModel model = method == Method::mp ? build_joint(suffix, losses)
                                               : build_minlp_s(suffix, losses);
        model.offset = k;
        const auto path =
            dir / ((method == Method::mp ? "joint_" : "reorder_") + std::to_string(k) + ".lp");
        export_lp(model, path);
        written.push_back(path);
    }
    return written;
}

}  // namespace sslot
