#include "sslot/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sslot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(std::initializer_list<std::string> parts) {
    std::string out;
    for (const auto &p : parts) {
        if (!out.empty()) out += '_';
        out += p;
    }
    return out;
}

std::string num(int v) { return std::to_string(v); }

class Builder {
  public:
    Builder(MilpModel &model) : m_(model) {}

    int add_variable(std::string name, VariableType type, double lo, double hi) {
        m_.variables.push_back({std::move(name), type, lo, hi});
        return static_cast<int>(m_.variables.size()) - 1;
    }

    void add_row(LinearRow row) { m_.rows.push_back(std::move(row)); }

    void add_indicator(int binary, int active, LinearRow row) {
        m_.indicators.push_back({binary, active, std::move(row)});
    }

  private:
    MilpModel &m_;
};

double level_bound(const Instance &instance, double big_m) {
    // Wide enough to contain every root of the linking equation: below
    // -level the first-period penalty alone exceeds any achievable cost.
    const auto &k = instance.costs;
    const double worst = k.fixed_ordering + instance.horizon() * (k.holding + k.penalty) * big_m;
    return big_m + worst / k.penalty;
}

void check_losses(const Instance &instance, const LossTable &losses) {
    const int T = instance.horizon();
    if (T == 0) throw ValidationError("model: empty horizon");
    if (static_cast<int>(losses.size()) != T) {
        throw ValidationError("model: loss table covers " + std::to_string(losses.size()) +
                              " periods, horizon is " + std::to_string(T));
    }
    for (int t = 0; t < T; ++t) {
        if (static_cast<int>(losses[t].size()) != t + 1) {
            throw ValidationError("model: loss segments missing for period " +
                                  std::to_string(t + 1));
        }
    }
}

// Adds one submodel's variables and rows. Returns its index set and the
// terms of its cost expression (without the c * sum(mean) constant).
SubmodelIndex add_submodel(MilpModel &model, ModelKind kind, bool exact_pieces,
                           std::optional<double> fixed_initial,
                           std::vector<LinearTerm> &cost, std::vector<LinearTerm> &cost_first) {
    Builder b(model);
    const auto &inst = model.instance;
    const auto &k = inst.costs;
    const int T = inst.horizon();
    const std::string tag = kind == ModelKind::reorder ? "s" : "S";
    const double level = level_bound(inst, model.big_m);
    const double excess_bound = 2.0 * (level + inst.total_mean()) + model.big_m;

    SubmodelIndex idx;
    idx.kind = kind;
    idx.tag = tag;
    if (fixed_initial) {
        idx.initial = b.add_variable("I0_" + tag, VariableType::continuous, *fixed_initial,
                                     *fixed_initial);
    } else {
        idx.initial = b.add_variable("I0_" + tag, VariableType::continuous, -level, level);
    }
    for (int t = 0; t < T; ++t) {
        const std::string p = num(t + 1);
        idx.closing.push_back(b.add_variable(join({"I", tag, p}), VariableType::continuous,
                                             -level - inst.total_mean(), level));
    }
    for (int t = 0; t < T; ++t) {
        idx.order.push_back(
            b.add_variable(join({"delta", tag, num(t + 1)}), VariableType::binary, 0.0, 1.0));
    }
    idx.cycle.resize(T);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j <= t; ++j) {
            idx.cycle[t].push_back(b.add_variable(join({"P", tag, num(j + 1), num(t + 1)}),
                                                  VariableType::binary, 0.0, 1.0));
        }
    }
    if (exact_pieces) {
        idx.piece.resize(T);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j <= t; ++j) {
                std::vector<int> ids;
                for (int i = 0; i < model.losses[t][j].segments(); ++i) {
                    ids.push_back(b.add_variable(join({"u", tag, num(j + 1), num(t + 1), num(i)}),
                                                 VariableType::binary, 0.0, 1.0));
                }
                idx.piece[t].push_back(std::move(ids));
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        idx.excess.push_back(b.add_variable(join({"H", tag, num(t + 1)}),
                                            VariableType::continuous, 0.0, excess_bound));
    }
    for (int t = 0; t < T; ++t) {
        idx.shortage.push_back(b.add_variable(join({"B", tag, num(t + 1)}),
                                              VariableType::continuous, 0.0, excess_bound));
    }

    // First period order is fixed by the submodel kind.
    const double first = kind == ModelKind::reorder ? 0.0 : 1.0;
    model.variables[idx.order[0]].lower = first;
    model.variables[idx.order[0]].upper = first;
    b.add_row({"first_" + tag, {{idx.order[0], 1.0}}, Sense::equal, first});
    if (kind == ModelKind::order_up_to) {
        b.add_row({"start_" + tag, {{idx.initial, 1.0}, {idx.closing[0], -1.0}}, Sense::equal,
                   inst.demands[0].mean});
    }

    for (int t = 0; t < T; ++t) {
        const std::string p = num(t + 1);
        const double mean = inst.demands[t].mean;
        const int prev = t == 0 ? idx.initial : idx.closing[t - 1];
        b.add_row({join({"order", tag, p}), {{idx.closing[t], 1.0}, {prev, -1.0}},
                   Sense::greater_equal, -mean});
        b.add_indicator(idx.order[t], 0,
                        {join({"balance", tag, p}), {{idx.closing[t], 1.0}, {prev, -1.0}},
                         Sense::equal, -mean});

        LinearRow assign{join({"assign", tag, p}), {}, Sense::equal, 1.0};
        for (int j = 0; j <= t; ++j) assign.terms.push_back({idx.cycle[t][j], 1.0});
        b.add_row(std::move(assign));
        // The first period always opens a cycle: either the forced order or
        // the initial inventory.
        for (int j = 0; j <= t; ++j) {
            LinearRow link{join({"link", tag, num(j + 1), p}), {{idx.cycle[t][j], 1.0}},
                           Sense::greater_equal, j == 0 ? 1.0 : 0.0};
            if (j > 0) link.terms.push_back({idx.order[j], -1.0});
            for (int q = j + 1; q <= t; ++q) link.terms.push_back({idx.order[q], 1.0});
            b.add_row(std::move(link));
        }

        const int H = idx.excess[t];
        const int B = idx.shortage[t];
        const int I = idx.closing[t];
        for (int j = 0; j <= t; ++j) {
            const auto &pl = model.losses[t][j];
            const auto a = pl.intercepts();
            for (int i = 0; i < pl.segments(); ++i) {
                const double l = pl.slopes[i];
                const double rhs = l * pl.mean + a[i];
                const std::string s = join({num(j + 1), p, num(i)});
                b.add_indicator(idx.cycle[t][j], 1,
                                {join({"hseg", tag, s}), {{H, 1.0}, {I, -l}}, Sense::greater_equal,
                                 rhs});
                b.add_indicator(idx.cycle[t][j], 1,
                                {join({"bseg", tag, s}), {{B, 1.0}, {I, 1.0 - l}},
                                 Sense::greater_equal, rhs});
                if (exact_pieces) {
                    const int u = idx.piece[t][j][i];
                    b.add_indicator(u, 1,
                                    {join({"hsel", tag, s}), {{H, 1.0}, {I, -l}}, Sense::less_equal,
                                     rhs});
                    b.add_indicator(u, 1,
                                    {join({"bsel", tag, s}), {{B, 1.0}, {I, 1.0 - l}},
                                     Sense::less_equal, rhs});
                }
            }
            if (exact_pieces) {
                LinearRow pick{join({"pick", tag, num(j + 1), p}), {{idx.cycle[t][j], -1.0}},
                               Sense::equal, 0.0};
                for (int u : idx.piece[t][j]) pick.terms.push_back({u, 1.0});
                b.add_row(std::move(pick));
            }
        }

        // Aggregated rows valid for whichever cycle is active. They need one
        // slope vector shared by all cycles ending in t.
        const auto &slopes = model.losses[t][0].slopes;
        bool shared = true;
        for (int j = 1; j <= t; ++j) shared = shared && model.losses[t][j].slopes == slopes;
        if (shared) {
            for (std::size_t i = 0; i < slopes.size(); ++i) {
                const double l = slopes[i];
                LinearRow hc{join({"hcut", tag, p, num(static_cast<int>(i))}),
                             {{H, 1.0}, {I, -l}},
                             Sense::greater_equal,
                             0.0,
                             true};
                LinearRow bc{join({"bcut", tag, p, num(static_cast<int>(i))}),
                             {{B, 1.0}, {I, 1.0 - l}},
                             Sense::greater_equal,
                             0.0,
                             true};
                for (int j = 0; j <= t; ++j) {
                    const auto &pl = model.losses[t][j];
                    const double coef = -(l * pl.mean + pl.intercepts()[i]);
                    hc.terms.push_back({idx.cycle[t][j], coef});
                    bc.terms.push_back({idx.cycle[t][j], coef});
                }
                b.add_row(std::move(hc));
                b.add_row(std::move(bc));
            }
        }
    }

    // Cost: K orders, holding, penalty, and c per unit ordered after I_0.
    for (int t = 0; t < T; ++t) {
        auto &dst = t == 0 ? cost_first : cost;
        if (k.fixed_ordering != 0.0) dst.push_back({idx.order[t], k.fixed_ordering});
        dst.push_back({idx.excess[t], k.holding});
        dst.push_back({idx.shortage[t], k.penalty});
    }
    if (k.unit != 0.0) {
        cost.push_back({idx.initial, -k.unit});
        cost.push_back({idx.closing[T - 1], k.unit});
    }
    return idx;
}

MilpModel base_model(const Instance &instance, const LossTable &losses, ModelKind kind) {
    validate(instance);
    check_losses(instance, losses);
    MilpModel model;
    model.kind = kind;
    model.instance = instance;
    model.losses = losses;
    model.big_m = instance.total_mean() + 6.0 * instance.pooled_std_dev() +
                  std::abs(instance.initial_inventory);
    return model;
}

MilpModel single(const Instance &instance, const LossTable &losses, ModelKind kind,
                 std::optional<double> fixed_initial) {
    MilpModel model = base_model(instance, losses, kind);
    std::vector<LinearTerm> cost;
    std::vector<LinearTerm> first;
    model.submodels.push_back(add_submodel(model, kind, false, fixed_initial, cost, first));
    model.objective = first;
    model.objective.insert(model.objective.end(), cost.begin(), cost.end());
    model.objective_constant = instance.costs.unit * instance.total_mean();
    return model;
}

double lhs_bound(const MilpModel &model, const LinearRow &row, bool upper) {
    double total = 0.0;
    for (const auto &t : row.terms) {
        const auto &v = model.variables[t.var];
        const bool take_upper = (t.coef > 0.0) == upper;
        const double bound = take_upper ? v.upper : v.lower;
        if (!std::isfinite(bound)) {
            throw ValidationError("LP export: variable " + v.name +
                                  " needs finite bounds for big-M lowering");
        }
        total += t.coef * bound;
    }
    return total;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_terms(std::ostringstream &out, const MilpModel &model,
                 const std::vector<LinearTerm> &terms) {
    int count = 0;
    for (const auto &t : terms) {
        if (t.coef == 0.0) continue;
        if (count > 0 && count % 6 == 0) out << "\n   ";
        out << (t.coef < 0.0 ? " - " : " + ") << fmt(std::abs(t.coef)) << ' '
            << model.variables[t.var].name;
        ++count;
    }
    if (count == 0) out << " 0 " << model.variables[terms.empty() ? 0 : terms[0].var].name;
}

void write_row(std::ostringstream &out, const MilpModel &model, const std::string &name,
               const std::vector<LinearTerm> &terms, Sense sense, double rhs) {
    out << ' ' << name << ':';
    write_terms(out, model, terms);
    out << (sense == Sense::less_equal ? " <= " : sense == Sense::greater_equal ? " >= " : " = ")
        << fmt(rhs) << '\n';
}

void write_indicator(std::ostringstream &out, const MilpModel &model, const IndicatorRow &ind) {
    // binary == 1 => a x >= r   becomes   a x - M b >= r - M, and so on.
    auto lower_one = [&](const std::string &name, Sense sense) {
        const auto &row = ind.row;
        auto terms = row.terms;
        double rhs = row.rhs;
        double big;
        if (sense == Sense::greater_equal) {
            big = std::max(0.0, row.rhs - lhs_bound(model, row, false));
        } else {
            big = std::max(0.0, lhs_bound(model, row, true) - row.rhs);
        }
        // Sign of the binary term that relaxes the row when the binary is
        // inactive.
        const double relax = sense == Sense::greater_equal ? big : -big;
        if (ind.active == 1) {
            terms.push_back({ind.binary, -relax});
            rhs -= relax;
        } else {
            terms.push_back({ind.binary, relax});
        }
        write_row(out, model, name, terms, sense, rhs);
    };
    if (ind.row.sense == Sense::equal) {
        lower_one(ind.row.name + "_lo", Sense::greater_equal);
        lower_one(ind.row.name + "_hi", Sense::less_equal);
    } else {
        lower_one(ind.row.name, ind.row.sense);
    }
}

bool is_fixed(const Variable &v) { return v.lower == v.upper; }

}  // namespace

LossTable make_loss_table(const Instance &instance, const Partition &partition) {
    validate(partition);
    const double e_w = approximation_error(partition);
    const int T = instance.horizon();
    LossTable table(T);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j <= t; ++j) {
            double mean = 0.0;
            double var = 0.0;
            for (int u = j; u <= t; ++u) {
                mean += instance.demands[u].mean;
                var += instance.demands[u].std_dev * instance.demands[u].std_dev;
            }
            table[t].push_back(piecewise_loss(partition, mean, std::sqrt(var), e_w));
        }
    }
    return table;
}

int MilpModel::find(const std::string &name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

const SubmodelIndex &MilpModel::submodel(ModelKind which) const {
    for (const auto &s : submodels) {
        if (s.kind == which) return s;
    }
    throw ValidationError("model has no such submodel");
}

MilpModel build_minlp_s(const Instance &instance, const LossTable &losses,
                        std::optional<double> initial_inventory) {
    return single(instance, losses, ModelKind::reorder, initial_inventory);
}

MilpModel build_minlp_S(const Instance &instance, const LossTable &losses) {
    return single(instance, losses, ModelKind::order_up_to, std::nullopt);
}

MilpModel build_joint(const Instance &instance, const LossTable &losses) {
    MilpModel model = base_model(instance, losses, ModelKind::joint);
    const double constant = instance.costs.unit * instance.total_mean();

    std::vector<LinearTerm> cost_S;
    std::vector<LinearTerm> first_S;
    const auto S = add_submodel(model, ModelKind::order_up_to, true, std::nullopt, cost_S, first_S);
    std::vector<LinearTerm> cost_s;
    std::vector<LinearTerm> first_s;
    const auto s = add_submodel(model, ModelKind::reorder, true, std::nullopt, cost_s, first_s);
    model.submodels = {S, s};

    model.order_up_to_cost = static_cast<int>(model.variables.size());
    model.variables.push_back({"C_S", VariableType::continuous, -kInf, kInf});
    model.reorder_cost = static_cast<int>(model.variables.size());
    model.variables.push_back({"G_s", VariableType::continuous, -kInf, kInf});

    auto definition = [&](const std::string &name, int var, const std::vector<LinearTerm> &a,
                          const std::vector<LinearTerm> &b) {
        LinearRow row{name, {{var, 1.0}}, Sense::equal, constant};
        for (const auto &t : a) row.terms.push_back({t.var, -t.coef});
        for (const auto &t : b) row.terms.push_back({t.var, -t.coef});
        model.rows.push_back(std::move(row));
    };
    definition("cost_S", model.order_up_to_cost, first_S, cost_S);
    definition("cost_s", model.reorder_cost, first_s, cost_s);
    model.rows.push_back({"link", {{model.reorder_cost, 1.0}, {model.order_up_to_cost, -1.0}},
                          Sense::equal, 0.0});
    model.rows.push_back({"levels", {{s.initial, 1.0}, {S.closing[0], -1.0}}, Sense::less_equal,
                          instance.demands[0].mean});

    // The reorder submodel's first-period holding and penalty stay out of
    // the objective.
    model.objective = first_S;
    model.objective.insert(model.objective.end(), cost_S.begin(), cost_S.end());
    for (const auto &t : first_s) {
        if (t.var == s.order[0]) model.objective.push_back(t);
    }
    model.objective.insert(model.objective.end(), cost_s.begin(), cost_s.end());
    model.objective_constant = 2.0 * constant;
    return model;
}

void fix_initial_inventory(MilpModel &model, double value) {
    auto &v = model.variables[model.submodel(ModelKind::reorder).initial];
    v.lower = value;
    v.upper = value;
}

void fix_order_pattern(MilpModel &model, ModelKind which, const std::vector<int> &pattern) {
    const auto &sub = model.submodel(which);
    const int T = model.horizon();
    if (static_cast<int>(pattern.size()) != T) {
        throw ValidationError("order pattern length does not match the horizon");
    }
    for (int t = 0; t < T; ++t) {
        if (pattern[t] != 0 && pattern[t] != 1) throw ValidationError("order pattern must be 0/1");
        auto &d = model.variables[sub.order[t]];
        if (pattern[t] < d.lower || pattern[t] > d.upper) {
            throw ValidationError("order pattern contradicts the fixed first-period order");
        }
        d.lower = d.upper = pattern[t];
    }
    int start = 0;
    for (int t = 0; t < T; ++t) {
        if (t > 0 && pattern[t] == 1) start = t;
        for (int j = 0; j <= t; ++j) {
            auto &p = model.variables[sub.cycle[t][j]];
            p.lower = p.upper = j == start ? 1.0 : 0.0;
        }
    }
}

double objective_value(const MilpModel &model, const std::vector<double> &values) {
    double total = model.objective_constant;
    for (const auto &t : model.objective) total += t.coef * values[t.var];
    return total;
}

RowViolation worst_violation(const MilpModel &model, const std::vector<double> &values) {
    RowViolation worst;
    auto note = [&](const std::string &name, double amount) {
        if (amount > worst.amount) worst = {name, amount};
    };
    auto row_violation = [&](const LinearRow &row) {
        double lhs = 0.0;
        for (const auto &t : row.terms) lhs += t.coef * values[t.var];
        switch (row.sense) {
            case Sense::less_equal: return lhs - row.rhs;
            case Sense::greater_equal: return row.rhs - lhs;
            case Sense::equal: return std::abs(lhs - row.rhs);
        }
        return 0.0;
    };
    if (values.size() != model.variables.size()) {
        return {"assignment size", kInf};
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto &v = model.variables[i];
        note(v.name + " bounds", std::max(v.lower - values[i], values[i] - v.upper));
        if (v.type == VariableType::binary) {
            note(v.name + " integrality", std::abs(values[i] - std::round(values[i])));
        }
    }
    for (const auto &row : model.rows) note(row.name, row_violation(row));
    for (const auto &ind : model.indicators) {
        if (std::lround(values[ind.binary]) == ind.active) note(ind.row.name, row_violation(ind.row));
    }
    return worst;
}

std::string format_lp(const MilpModel &model) {
    std::ostringstream out;
    const char *kind = model.kind == ModelKind::reorder       ? "reorder"
                       : model.kind == ModelKind::order_up_to ? "order-up-to"
                                                              : "joint";
    out << "\\ sslot " << kind << " model, periods " << model.offset << ".."
        << model.offset + model.horizon() - 1 << "\n";
    out << "\\ objective constant " << fmt(model.objective_constant) << "\n";
    out << "Minimize\n obj:";
    if (model.objective.empty()) {
        out << " 0 " << model.variables.front().name;
    } else {
        write_terms(out, model, model.objective);
    }
    out << "\nSubject To\n";
    for (const auto &row : model.rows) {
        write_row(out, model, row.name, row.terms, row.sense, row.rhs);
    }
    for (const auto &ind : model.indicators) {
        // A fixed binary either enforces the row outright or drops it.
        const auto &b = model.variables[ind.binary];
        if (is_fixed(b)) {
            if (std::lround(b.lower) == ind.active) {
                write_row(out, model, ind.row.name, ind.row.terms, ind.row.sense, ind.row.rhs);
            }
            continue;
        }
        write_indicator(out, model, ind);
    }
    out << "Bounds\n";
    std::vector<const Variable *> binaries;
    for (const auto &v : model.variables) {
        if (is_fixed(v)) {
            out << ' ' << v.name << " = " << fmt(v.lower) << '\n';
            continue;
        }
        if (v.type == VariableType::binary) {
            binaries.push_back(&v);
            continue;
        }
        if (std::isinf(v.lower) && std::isinf(v.upper)) {
            out << ' ' << v.name << " free\n";
            continue;
        }
        out << ' ' << (std::isinf(v.lower) ? std::string("-inf") : fmt(v.lower)) << " <= "
            << v.name << " <= " << (std::isinf(v.upper) ? std::string("+inf") : fmt(v.upper))
            << '\n';
    }
    if (!binaries.empty()) {
        out << "Binary\n";
        int count = 0;
        for (const auto *v : binaries) {
            out << ' ' << v->name;
            if (++count % 10 == 0) out << '\n';
        }
        if (count % 10 != 0) out << '\n';
    }
    out << "End\n";
    return out.str();
}

void export_lp(const MilpModel &model, const std::filesystem::path &path) {
    const auto text = format_lp(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace sslot
