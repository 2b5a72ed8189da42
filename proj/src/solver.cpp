#include "sslot/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "sslot/pwl.hpp"

namespace sslot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConvexPwl upper_function(const PiecewiseLoss &pl) {
    std::vector<double> values;
    values.reserve(pl.breakpoints.size());
    for (double x : pl.breakpoints) values.push_back(pl.upper(x));
    return ConvexPwl::interpolate(pl.breakpoints, std::move(values), 0.0, 1.0);
}

// Cycle costs in cumulative coordinates z = y + (mean demand before the
// cycle), where y is the inventory level the cycle starts from. In these
// coordinates the non-negative order constraints become z_1 <= z_2 <= ...
struct Chain {
    int T = 0;
    double K = 0.0;
    double c = 0.0;
    std::vector<double> before;               // mean demand before period j
    std::vector<std::vector<ConvexPwl>> cost;  // [j][e - j], periods j..e
    std::vector<std::vector<double>> lowest;   // unconstrained minimum of cost
};

Chain make_chain(const MilpModel &model) {
    const auto &inst = model.instance;
    const auto &k = inst.costs;
    Chain ch;
    ch.T = inst.horizon();
    ch.K = k.fixed_ordering;
    ch.c = k.unit;
    double acc = 0.0;
    for (int j = 0; j < ch.T; ++j) {
        ch.before.push_back(acc);
        acc += inst.demands[j].mean;
    }
    ch.cost.resize(ch.T);
    ch.lowest.resize(ch.T);
    for (int j = 0; j < ch.T; ++j) {
        ConvexPwl total = ConvexPwl::linear(0.0, 0.0);
        for (int e = j; e < ch.T; ++e) {
            const auto &pl = model.losses[e][j];
            // h * H + b * B with B = H - (y - mean).
            ConvexPwl term = upper_function(pl);
            term.scale(k.holding + k.penalty).add_linear(-k.penalty, k.penalty * pl.mean);
            total += term.shifted(ch.before[j]);
            ch.cost[j].push_back(total);
            ch.lowest[j].push_back(total.minimum().value);
        }
    }
    return ch;
}

std::vector<int> cycle_starts(const std::vector<int> &pattern) {
    std::vector<int> starts{0};
    for (std::size_t t = 1; t < pattern.size(); ++t) {
        if (pattern[t] == 1) starts.push_back(static_cast<int>(t));
    }
    return starts;
}

int cycle_end(const Chain &ch, const std::vector<int> &starts, std::size_t i) {
    return i + 1 < starts.size() ? starts[i + 1] - 1 : ch.T - 1;
}

// Value functions U_i of the chain: U_last = F_last and
// U_i = F_i + suffix_min(U_{i+1}); U_1 restricted to [lo, hi].
std::vector<ConvexPwl> chain_values(const Chain &ch, const std::vector<int> &starts, double lo,
                                    double hi) {
    const std::size_t m = starts.size();
    std::vector<ConvexPwl> U(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = m - 1 - r;
        const int j = starts[i];
        ConvexPwl f = ch.cost[j][cycle_end(ch, starts, i) - j];
        if (i + 1 == m && ch.c != 0.0) f.add_linear(ch.c, 0.0);
        if (i == 0 && ch.c != 0.0) f.add_linear(-ch.c, 0.0);
        if (i + 1 < m) f += U[i + 1].suffix_min();
        if (i == 0) f = f.restricted(lo, hi);
        U[i] = std::move(f);
    }
    return U;
}

struct Candidate {
    std::vector<int> pattern;
    double value = kInf;  // includes K
    double level = 0.0;   // z_1
};

// Depth-first walk over cycle partitions that respect the fixed order
// indicators. Children are visited in lexicographic order of the pattern,
// so the first of several equal leaves is the lexicographically smallest.
// The bound drops the coupling z_i <= z_{i+1} between cycles.
class PatternWalk {
  public:
    PatternWalk(const Chain &ch, const MilpModel &model, const SubmodelIndex &sub, double lo,
                double hi)
        : ch_(ch), fixed_(ch.T, -1), max_end_(ch.T), rest_(ch.T + 1, kInf) {
        for (int t = 0; t < ch.T; ++t) {
            const auto &v = model.variables[sub.order[t]];
            if (v.lower == v.upper) fixed_[t] = static_cast<int>(std::lround(v.lower));
        }
        if (fixed_[0] < 0) throw SolverError("first order indicator must be fixed");
        for (int j = ch.T - 1; j >= 0; --j) {
            max_end_[j] = j + 1 < ch.T && fixed_[j + 1] != 1 ? max_end_[j + 1] : j;
        }
        for (int e = 0; e < ch.T; ++e) {
            first_.push_back(ch.cost[0][e].restricted(lo, hi).minimum().value);
        }
        rest_[ch.T] = 0.0;
        for (int j = ch.T - 1; j >= 1; --j) {
            if (fixed_[j] == 0) continue;
            for (int e = j; e <= max_end_[j]; ++e) {
                if (!closes(e)) continue;
                rest_[j] = std::min(rest_[j], ch.K + ch.lowest[j][e - j] + rest_[e + 1]);
            }
        }
    }

    // accept(bound) decides whether to descend; leaf(pattern, orders)
    // returns false to stop the walk.
    template <typename Accept, typename Leaf>
    void run(Accept &&accept, Leaf &&leaf) const {
        std::vector<int> pattern(ch_.T, 0);
        pattern[0] = fixed_[0];
        bool go = true;
        visit(0, pattern[0], pattern[0] * ch_.K, pattern, accept, leaf, go);
    }

  private:
    bool closes(int e) const { return e + 1 == ch_.T || fixed_[e + 1] != 0; }

    template <typename Accept, typename Leaf>
    void visit(int j, int orders, double partial, std::vector<int> &pattern, Accept &accept,
               Leaf &leaf, bool &go) const {
        for (int e = max_end_[j]; e >= j && go; --e) {
            if (!closes(e)) continue;
            const double cycle = j == 0 ? first_[e] : ch_.lowest[j][e - j];
            const double here = partial + cycle;
            if (!accept(here + rest_[e + 1])) continue;
            if (e + 1 == ch_.T) {
                go = leaf(pattern, orders);
            } else {
                pattern[e + 1] = 1;
                visit(e + 1, orders + 1, here + ch_.K, pattern, accept, leaf, go);
                pattern[e + 1] = 0;
            }
        }
    }

    const Chain &ch_;
    std::vector<int> fixed_;
    std::vector<int> max_end_;
    std::vector<double> first_;
    std::vector<double> rest_;
};

bool better(double value, double best, double tol) {
    if (!std::isfinite(best)) return value < best;
    return value < best - tol * std::max(1.0, std::abs(best));
}

// Minimum over patterns with z_1 restricted to [lo, hi] (a point when the
// initial inventory is fixed).
Candidate best_pattern(const Chain &ch, const MilpModel &model, const SubmodelIndex &sub,
                       const SolveOptions &options, long &nodes, bool &limited) {
    const auto &init = model.variables[sub.initial];
    const double lo = init.lower;
    const double hi = init.upper;
    const PatternWalk walk(ch, model, sub, lo, hi);
    Candidate best;
    walk.run([&](double bound) { return better(bound, best.value, options.tolerance); },
             [&](const std::vector<int> &pattern, int orders) {
                 if (options.node_limit > 0 && nodes >= options.node_limit) {
                     limited = true;
                     return false;
                 }
                 ++nodes;
                 const auto U = chain_values(ch, cycle_starts(pattern), lo, hi);
                 const auto m = U[0].minimum();
                 const double value = ch.K * orders + m.value;
                 if (better(value, best.value, options.tolerance)) best = {pattern, value, m.x};
                 return true;
             });
    return best;
}

void fill_submodel(const Chain &ch, const MilpModel &model, const SubmodelIndex &sub,
                   const std::vector<int> &pattern, double level, std::vector<double> &values) {
    const auto starts = cycle_starts(pattern);
    const auto U = chain_values(ch, starts, level, level);
    std::vector<double> z{level};
    for (std::size_t i = 1; i < starts.size(); ++i) {
        z.push_back(std::max(z.back(), U[i].minimum().x));
    }
    values[sub.initial] = level;
    for (int t = 0; t < ch.T; ++t) values[sub.order[t]] = pattern[t];
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const int j = starts[i];
        const double y = z[i] - ch.before[j];
        for (int t = j; t <= cycle_end(ch, starts, i); ++t) {
            const auto &pl = model.losses[t][j];
            const double closing = y - pl.mean;
            const double excess = pl.upper(y);
            values[sub.closing[t]] = closing;
            values[sub.excess[t]] = excess;
            values[sub.shortage[t]] = excess - closing;
            for (int q = 0; q <= t; ++q) values[sub.cycle[t][q]] = q == j ? 1.0 : 0.0;
            if (!sub.piece.empty()) {
                const auto a = pl.intercepts();
                int active = 0;
                for (int s = 1; s < pl.segments(); ++s) {
                    if (pl.slopes[s] * y + a[s] > pl.slopes[active] * y + a[active]) active = s;
                }
                for (int q = 0; q <= t; ++q) {
                    for (std::size_t s = 0; s < sub.piece[t][q].size(); ++s) {
                        values[sub.piece[t][q][s]] =
                            q == j && static_cast<int>(s) == active ? 1.0 : 0.0;
                    }
                }
            }
        }
    }
}

double submodel_cost(const MilpModel &model, const SubmodelIndex &sub,
                     const std::vector<double> &values) {
    const auto &k = model.instance.costs;
    const int T = model.horizon();
    double cost = k.unit * (model.instance.total_mean() - values[sub.initial] +
                            values[sub.closing[T - 1]]);
    for (int t = 0; t < T; ++t) {
        cost += k.fixed_ordering * values[sub.order[t]] + k.holding * values[sub.excess[t]] +
                k.penalty * values[sub.shortage[t]];
    }
    return cost;
}

SolveResult solve_single(const MilpModel &model, const SolveOptions &options) {
    SolveResult res;
    const Chain ch = make_chain(model);
    const auto &sub = model.submodels.front();
    bool limited = false;
    const auto best = best_pattern(ch, model, sub, options, res.nodes, limited);
    if (!std::isfinite(best.value)) {
        res.status = limited ? SolveStatus::node_limit : SolveStatus::infeasible;
        return res;
    }
    res.values.assign(model.variables.size(), 0.0);
    fill_submodel(ch, model, sub, best.pattern, best.level, res.values);
    res.objective = objective_value(model, res.values);
    res.status = limited ? SolveStatus::node_limit : SolveStatus::optimal;
    return res;
}

SolveResult solve_joint(const MilpModel &model, const SolveOptions &options) {
    SolveResult res;
    const Chain ch = make_chain(model);
    const auto &S = model.submodel(ModelKind::order_up_to);
    const auto &s = model.submodel(ModelKind::reorder);
    bool limited = false;

    const auto up = best_pattern(ch, model, S, options, res.nodes, limited);
    if (!std::isfinite(up.value)) {
        res.status = limited ? SolveStatus::node_limit : SolveStatus::infeasible;
        return res;
    }
    const double target = up.value;  // C_S at its minimiser
    const double top = up.level;

    // Stretches where some reorder pattern reaches G_s <= target.
    const auto &init = model.variables[s.initial];
    const double lo = init.lower;
    const double hi = std::min(init.upper, top);
    if (lo > hi) {
        res.status = SolveStatus::infeasible;
        return res;
    }
    const PatternWalk walk(ch, model, s, lo, hi);
    std::vector<std::pair<double, double>> stretches;
    std::vector<std::pair<std::vector<int>, ConvexPwl>> candidates;
    walk.run([&](double bound) { return bound <= target; },
             [&](const std::vector<int> &pattern, int orders) {
                 if (options.node_limit > 0 && res.nodes >= options.node_limit) {
                     limited = true;
                     return false;
                 }
                 ++res.nodes;
                 auto U = chain_values(ch, cycle_starts(pattern), lo, hi);
                 U[0].add_linear(0.0, ch.K * orders);
                 if (const auto iv = U[0].sublevel(target)) {
                     stretches.push_back(*iv);
                     candidates.emplace_back(pattern, std::move(U[0]));
                 }
                 return true;
             });
    if (stretches.empty()) {
        res.status = limited ? SolveStatus::node_limit : SolveStatus::infeasible;
        return res;
    }
    std::sort(stretches.begin(), stretches.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto &iv : stretches) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, iv.second);
        } else {
            merged.push_back(iv);
        }
    }
    res.link_roots = static_cast<int>(merged.size());
    // The stretch that contains I_0^S (G_s there is C_S - K <= C_S).
    double root = merged.back().first;
    for (const auto &iv : merged) {
        if (iv.first <= top && top <= iv.second) root = iv.first;
    }
    if (root <= lo) {
        throw SolverError("linking equation has no root above the lower bound of I0_s");
    }

    // Lexicographically smallest reorder pattern attaining the target at the root.
    const std::vector<int> *chosen = nullptr;
    for (const auto &[pattern, g] : candidates) {
        if (g(root) <= target + 1e-9 * std::max(1.0, std::abs(target))) {
            chosen = &pattern;
            break;
        }
    }
    if (!chosen) throw SolverError("no reorder pattern attains the linking equation at its root");

    res.values.assign(model.variables.size(), 0.0);
    fill_submodel(ch, model, S, up.pattern, up.level, res.values);
    fill_submodel(ch, model, s, *chosen, root, res.values);
    res.values[model.order_up_to_cost] = submodel_cost(model, S, res.values);
    res.values[model.reorder_cost] = submodel_cost(model, s, res.values);
    res.objective = objective_value(model, res.values);
    res.status = limited ? SolveStatus::node_limit : SolveStatus::optimal;
    return res;
}

}  // namespace

const char *to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::node_limit: return "node-limit";
    }
    return "unknown";
}

SolveResult solve_exact(const MilpModel &model, const SolveOptions &options) {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res =
        model.kind == ModelKind::joint ? solve_joint(model, options) : solve_single(model, options);
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

SolveResult import_solution(const MilpModel &model, const std::filesystem::path &path) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < model.variables.size(); ++i) {
        index.emplace(model.variables[i].name, static_cast<int>(i));
    }
    std::istringstream in(read_text_file(path));
    std::vector<double> values(model.variables.size(), 0.0);
    std::vector<bool> seen(model.variables.size(), false);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string name;
        double value;
        if (!(row >> name >> value)) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": expected 'name value'");
        }
        const auto it = index.find(name);
        if (it == index.end()) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": unknown variable '" + name + "'");
        }
        values[it->second] = value;
        seen[it->second] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw ParseError(path.string() + ": no value for variable '" + model.variables[i].name +
                             "'");
        }
    }
    const auto worst = worst_violation(model, values);
    if (worst.amount > 1e-6) {
        std::ostringstream msg;
        msg << path.string() << ": solution violates " << worst.row << " by " << worst.amount;
        throw SolverError(msg.str());
    }
    SolveResult res;
    res.status = SolveStatus::optimal;
    res.values = std::move(values);
    res.objective = objective_value(model, res.values);
    return res;
}

SubmodelSolution submodel_solution(const MilpModel &model, ModelKind which,
                                   const std::vector<double> &values) {
    const auto &sub = model.submodel(which);
    SubmodelSolution out;
    const int T = model.horizon();
    out.initial = values[sub.initial];
    for (int t = 0; t < T; ++t) {
        out.orders.push_back(static_cast<int>(std::lround(values[sub.order[t]])));
        int start = 0;
        for (int j = 0; j <= t; ++j) {
            if (values[sub.cycle[t][j]] > 0.5) start = j + 1;
        }
        out.cycle_start.push_back(start);
        out.closing.push_back(values[sub.closing[t]]);
        out.excess.push_back(values[sub.excess[t]]);
        out.shortage.push_back(values[sub.shortage[t]]);
    }
    out.cost = submodel_cost(model, sub, values);
    return out;
}

JointSolution joint_solution(const MilpModel &model, const SolveResult &result) {
    if (model.kind != ModelKind::joint) throw ValidationError("joint_solution needs a joint model");
    if (result.values.size() != model.variables.size()) {
        throw ValidationError("solution does not belong to this model");
    }
    JointSolution out;
    out.up_to = submodel_solution(model, ModelKind::order_up_to, result.values);
    out.reorder = submodel_solution(model, ModelKind::reorder, result.values);
    out.order_up_to = out.up_to.initial;
    out.reorder_point = out.reorder.initial;
    out.objective = result.objective;
    out.linked_cost = result.values[model.order_up_to_cost];
    out.link_roots = result.link_roots;
    return out;
}

}  // namespace sslot
